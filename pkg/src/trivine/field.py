"""Scalar fields on grids, isosurface extraction and contour lines.

Density fields are sampled on the standard-normal-margin scale. Isosurfaces
come from the classic 256-case marching-cubes table with linear interpolation
along grid edges; vertices are created once per crossed grid edge (global edge
identity), so meshes are welded and connectivity is exact. Contour lines use
marching squares with the bilinear center value deciding saddle cells.

All functions are pure; field sampling and cube processing partition into
independent slabs, and the global-edge vertex ids give a deterministic
welding reduction independent of evaluation order.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np
from scipy import special
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ._mc_tables import CORNER_OFFSETS, EDGE_TABLE, TRI_TABLE
from .errors import DomainError
from .vine import Margins, VineSpec3D, _norm_pdf

# Contour levels used by all built-in renderings, outermost first.
DEFAULT_LEVELS = (0.015, 0.035, 0.075, 0.11)


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned evaluation grid (any dimension; densities use 3)."""

    lo: tuple[float, ...] = (-3.0, -3.0, -3.0)
    hi: tuple[float, ...] = (3.0, 3.0, 3.0)
    n: tuple[int, ...] = (96, 96, 96)

    def __post_init__(self):
        lo = tuple(float(x) for x in self.lo)
        hi = tuple(float(x) for x in self.hi)
        n = tuple(int(k) for k in self.n)
        if not (len(lo) == len(hi) == len(n)):
            raise DomainError("lo, hi and n must have matching lengths")
        if any(k < 2 for k in n):
            raise DomainError("grid needs at least 2 points per axis")
        if any(a >= b for a, b in zip(lo, hi)):
            raise DomainError("grid requires lo < hi per axis")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "n", n)

    @property
    def dim(self) -> int:
        return len(self.n)

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(a, b, k) for a, b, k in zip(self.lo, self.hi, self.n)]

    def spacing(self) -> tuple[float, ...]:
        return tuple((b - a) / (k - 1) for a, b, k in zip(self.lo, self.hi, self.n))

    @classmethod
    def cube(cls, lo: float = -3.0, hi: float = 3.0, n: int = 96) -> "GridSpec":
        return cls((lo,) * 3, (hi,) * 3, (n,) * 3)

    @classmethod
    def square(cls, lo: float = -3.0, hi: float = 3.0, n: int = 96) -> "GridSpec":
        return cls((lo,) * 2, (hi,) * 2, (n,) * 2)

    def to_json(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi), "n": list(self.n)}

    @classmethod
    def from_json(cls, obj: dict) -> "GridSpec":
        return cls(tuple(obj["lo"]), tuple(obj["hi"]), tuple(obj["n"]))


@dataclass(frozen=True)
class ScalarField3D:
    """Gridded nonnegative samples; array index (i, j, k) follows axes 1..3."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        if self.grid.dim != 3:
            raise DomainError("ScalarField3D requires a 3-D grid")
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != tuple(self.grid.n):
            raise DomainError(f"values shape {vals.shape} != grid {self.grid.n}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("field values must be finite")
        object.__setattr__(self, "values", vals)

    def flat(self) -> np.ndarray:
        """First axis fastest, matching the external row-major-by-axis layout."""
        return self.values.reshape(-1, order="F")

    @classmethod
    def from_flat(cls, grid: GridSpec, flat: np.ndarray) -> "ScalarField3D":
        return cls(grid, np.asarray(flat, dtype=float).reshape(grid.n, order="F"))

    def interp(self, pts: np.ndarray) -> np.ndarray:
        return trilinear(self.grid, self.values, pts)


@dataclass(frozen=True)
class IsoMesh:
    level: float
    vertices: np.ndarray  # (M, 3)
    normals: np.ndarray  # (M, 3), unit, oriented along decreasing field
    triangles: np.ndarray  # (T, 3) int indices

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        n = np.asarray(self.normals, dtype=float).reshape(-1, 3)
        t = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if n.shape != v.shape:
            raise DomainError("normals must match vertices")
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise DomainError("triangle indices out of range")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "normals", n)
        object.__setattr__(self, "triangles", t)

    @property
    def is_empty(self) -> bool:
        return self.triangles.shape[0] == 0

    def n_components(self) -> int:
        """Connected components over shared-vertex adjacency."""
        if self.is_empty:
            return 0
        t = self.triangles
        rows = np.concatenate([t[:, 0], t[:, 1], t[:, 2]])
        cols = np.concatenate([t[:, 1], t[:, 2], t[:, 0]])
        used = np.unique(t)
        remap = np.zeros(self.vertices.shape[0], dtype=np.int64)
        remap[used] = np.arange(used.size)
        adj = coo_matrix(
            (np.ones(rows.size), (remap[rows], remap[cols])), shape=(used.size, used.size)
        )
        ncomp, _ = connected_components(adj, directed=False)
        return int(ncomp)

    def area(self) -> float:
        if self.is_empty:
            return 0.0
        p = self.vertices[self.triangles]
        cross = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
        return float(0.5 * np.sum(np.linalg.norm(cross, axis=1)))

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "vertices": self.vertices.tolist(),
            "normals": self.normals.tolist(),
            "triangles": self.triangles.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "IsoMesh":
        return cls(
            level=float(obj["level"]),
            vertices=np.asarray(obj["vertices"], dtype=float).reshape(-1, 3),
            normals=np.asarray(obj["normals"], dtype=float).reshape(-1, 3),
            triangles=np.asarray(obj["triangles"], dtype=np.int64).reshape(-1, 3),
        )


@dataclass(frozen=True)
class ContourSet2D:
    level: float
    polylines: list[np.ndarray] = field(default_factory=list)
    closed: list[bool] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "polylines": [p.tolist() for p in self.polylines],
            "closed": list(self.closed),
        }


# ---------------------------------------------------------------------------
# field sampling


def sample_scalar_field(density_z, grid: GridSpec, chunk: int = 262_144) -> ScalarField3D:
    """Evaluate a z-scale density callable on the grid, in flat chunks."""
    ax = grid.axes()
    Z1, Z2, Z3 = np.meshgrid(*ax, indexing="ij")
    flat = np.empty(Z1.size)
    z1, z2, z3 = Z1.ravel(), Z2.ravel(), Z3.ravel()
    for s in range(0, flat.size, chunk):
        e = min(s + chunk, flat.size)
        flat[s:e] = density_z(z1[s:e], z2[s:e], z3[s:e])
    return ScalarField3D(grid, flat.reshape(grid.n))


def sample_density(spec: VineSpec3D, grid: GridSpec | None = None) -> ScalarField3D:
    """Density field of a vine model on the standard-normal scale.

    The per-axis normal CDF and pdf values are computed once and broadcast;
    the copula factors dominate the cost.
    """
    if spec.margins is not Margins.STD_NORMAL:
        raise DomainError("sample_density requires std_normal margins")
    grid = grid or GridSpec.cube()
    if grid.dim != 3:
        raise DomainError("sample_density requires a 3-D grid")
    ax = grid.axes()
    u_ax = [special.ndtr(a) for a in ax]
    w_ax = [_norm_pdf(a) for a in ax]
    U1 = u_ax[0][:, None, None]
    U2 = u_ax[1][None, :, None]
    U3 = u_ax[2][None, None, :]
    dens = spec.density_u(*np.broadcast_arrays(U1, U2, U3))
    dens *= w_ax[0][:, None, None]
    dens *= w_ax[1][None, :, None]
    dens *= w_ax[2][None, None, :]
    return ScalarField3D(grid, dens)


def trilinear(grid: GridSpec, values: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Trilinear interpolation of grid values at world-coordinate points."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 3)
    out_idx = []
    frac = []
    for d in range(3):
        step = (grid.hi[d] - grid.lo[d]) / (grid.n[d] - 1)
        x = (pts[:, d] - grid.lo[d]) / step
        i0 = np.clip(np.floor(x).astype(np.int64), 0, grid.n[d] - 2)
        out_idx.append(i0)
        frac.append(x - i0)
    i, j, k = out_idx
    fx, fy, fz = frac
    out = np.zeros(pts.shape[0])
    for di, dj, dk in CORNER_OFFSETS:
        w = (
            (fx if di else 1 - fx)
            * (fy if dj else 1 - fy)
            * (fz if dk else 1 - fz)
        )
        out += w * values[i + di, j + dj, k + dk]
    return out


# ---------------------------------------------------------------------------
# marching cubes


def _edge_vertex_positions(grid: GridSpec, values: np.ndarray, level: float, axis: int):
    """Vertices on grid edges along one axis where the level is crossed.

    Returns (vertex id grid with -1 for uncrossed edges, positions (m,3)).
    """
    below = values < level
    sl_lo = [slice(None)] * 3
    sl_hi = [slice(None)] * 3
    sl_lo[axis] = slice(0, -1)
    sl_hi[axis] = slice(1, None)
    crossed = below[tuple(sl_lo)] != below[tuple(sl_hi)]
    v0 = values[tuple(sl_lo)][crossed]
    v1 = values[tuple(sl_hi)][crossed]
    t = (level - v0) / (v1 - v0)
    idx = np.argwhere(crossed).astype(float)
    ax = grid.axes()
    step = [(grid.hi[d] - grid.lo[d]) / (grid.n[d] - 1) for d in range(3)]
    pos = np.empty((idx.shape[0], 3))
    for d in range(3):
        pos[:, d] = grid.lo[d] + idx[:, d] * step[d]
    pos[:, axis] += t * step[axis]
    ids = np.full(crossed.shape, -1, dtype=np.int64)
    ids[crossed] = np.arange(idx.shape[0])
    return ids, pos


# local cell edge -> (axis, di, dj, dk) offset of the owning grid edge
_CELL_EDGES = (
    (0, 0, 0, 0),   # e0: v0-v1, x edge
    (1, 1, 0, 0),   # e1: v1-v2, y edge
    (0, 0, 1, 0),   # e2: v3-v2, x edge
    (1, 0, 0, 0),   # e3: v0-v3, y edge
    (0, 0, 0, 1),   # e4
    (1, 1, 0, 1),   # e5
    (0, 0, 1, 1),   # e6
    (1, 0, 0, 1),   # e7
    (2, 0, 0, 0),   # e8: v0-v4, z edge
    (2, 1, 0, 0),   # e9
    (2, 1, 1, 0),   # e10
    (2, 0, 1, 0),   # e11
)


def marching_cubes(fld: ScalarField3D, level: float) -> IsoMesh:
    """Standard 256-case extraction with linear edge interpolation.

    Vertices are shared through global grid-edge identity, so the mesh is
    welded; an empty mesh is returned when the level misses the field range.
    """
    if level <= 0:
        raise DomainError("level must be positive")
    values = fld.values
    grid = fld.grid
    if level >= values.max() or level <= values.min():
        return IsoMesh(level, np.zeros((0, 3)), np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))

    id_grids = []
    pos_list = []
    offset = 0
    offsets = []
    for axis in range(3):
        ids, pos = _edge_vertex_positions(grid, values, level, axis)
        id_grids.append(ids)
        pos_list.append(pos)
        offsets.append(offset)
        offset += pos.shape[0]
    verts = np.concatenate(pos_list, axis=0) if offset else np.zeros((0, 3))

    below = values < level
    cube_index = np.zeros(tuple(n - 1 for n in grid.n), dtype=np.int32)
    for c, (di, dj, dk) in enumerate(CORNER_OFFSETS):
        n1, n2, n3 = grid.n
        sub = below[di:n1 - 1 + di, dj:n2 - 1 + dj, dk:n3 - 1 + dk]
        cube_index |= sub.astype(np.int32) << c

    active = np.argwhere((EDGE_TABLE[cube_index] != 0))
    if active.shape[0] == 0:
        return IsoMesh(level, np.zeros((0, 3)), np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))
    ai, aj, ak = active[:, 0], active[:, 1], active[:, 2]
    cases = cube_index[ai, aj, ak]

    # (n_active, 12) global vertex ids for the cell-local edges
    cell_edge_ids = np.empty((active.shape[0], 12), dtype=np.int64)
    for e, (axis, di, dj, dk) in enumerate(_CELL_EDGES):
        local = id_grids[axis][ai + di, aj + dj, ak + dk]
        cell_edge_ids[:, e] = np.where(local >= 0, local + offsets[axis], -1)

    tri_rows = TRI_TABLE[cases]  # (n_active, 16)
    tris = []
    for t0 in range(0, 15, 3):
        triple = tri_rows[:, t0:t0 + 3]
        mask = triple[:, 0] >= 0
        if not np.any(mask):
            break
        rows = np.nonzero(mask)[0]
        gathered = np.take_along_axis(cell_edge_ids[rows], triple[rows].astype(np.int64), axis=1)
        tris.append(gathered)
    triangles = np.concatenate(tris, axis=0) if tris else np.zeros((0, 3), dtype=np.int64)

    # drop degenerate triangles (repeated vertices or collapsed area)
    if triangles.shape[0]:
        distinct = (
            (triangles[:, 0] != triangles[:, 1])
            & (triangles[:, 1] != triangles[:, 2])
            & (triangles[:, 0] != triangles[:, 2])
        )
        triangles = triangles[distinct]
        p = verts[triangles]
        area2 = np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)
        triangles = triangles[area2 > 2e-12]

    normals = _gradient_normals(grid, values, verts)
    return IsoMesh(level, verts, normals, triangles)


def _gradient_normals(grid: GridSpec, values: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Unit normals from central-difference gradients, pointing downhill."""
    if verts.shape[0] == 0:
        return np.zeros((0, 3))
    steps = [(grid.hi[d] - grid.lo[d]) / (grid.n[d] - 1) for d in range(3)]
    grads = np.gradient(values, *steps)
    n = np.column_stack([-trilinear(grid, g, verts) for g in grads])
    norm = np.linalg.norm(n, axis=1)
    norm[norm == 0] = 1.0
    return n / norm[:, None]


# ---------------------------------------------------------------------------
# marching squares

# cell corners (bottom-left CCW): c0=(i,j) c1=(i+1,j) c2=(i+1,j+1) c3=(i,j+1)
# cell edges: e0 bottom (x edge at (i,j)), e1 right (y edge at (i+1,j)),
#             e2 top (x edge at (i,j+1)), e3 left (y edge at (i,j))
_MS_SEGMENTS: dict[int, tuple[tuple[int, int], ...]] = {
    0: (), 15: (),
    1: ((3, 0),), 14: ((3, 0),),
    2: ((0, 1),), 13: ((0, 1),),
    4: ((1, 2),), 11: ((1, 2),),
    8: ((2, 3),), 7: ((2, 3),),
    3: ((3, 1),), 12: ((3, 1),),
    6: ((0, 2),), 9: ((0, 2),),
    5: None,  # saddle, resolved by the center value
    10: None,
}


def contour_lines(grid: GridSpec, values: np.ndarray, level: float) -> ContourSet2D:
    """Marching squares returning chained polylines with closure flags."""
    if grid.dim != 2:
        raise DomainError("contour_lines requires a 2-D grid")
    n1, n2 = grid.n
    below = values < level

    # crossing vertices on global x/y edges
    segs = []
    edge_pts: dict[tuple[int, int, int], np.ndarray] = {}
    xs, ys = grid.axes()

    def edge_point(axis, i, j):
        key = (axis, i, j)
        if key in edge_pts:
            return key
        if axis == 0:
            v0, v1 = values[i, j], values[i + 1, j]
            t = (level - v0) / (v1 - v0)
            edge_pts[key] = np.array([xs[i] + t * (xs[i + 1] - xs[i]), ys[j]])
        else:
            v0, v1 = values[i, j], values[i, j + 1]
            t = (level - v0) / (v1 - v0)
            edge_pts[key] = np.array([xs[i], ys[j] + t * (ys[j + 1] - ys[j])])
        return key

    def cell_edge_key(e, i, j):
        if e == 0:
            return edge_point(0, i, j)
        if e == 1:
            return edge_point(1, i + 1, j)
        if e == 2:
            return edge_point(0, i, j + 1)
        return edge_point(1, i, j)

    for i in range(n1 - 1):
        for j in range(n2 - 1):
            idx = (
                (1 if below[i, j] else 0)
                | (2 if below[i + 1, j] else 0)
                | (4 if below[i + 1, j + 1] else 0)
                | (8 if below[i, j + 1] else 0)
            )
            if idx in (0, 15):
                continue
            pairs = _MS_SEGMENTS[idx]
            if pairs is None:
                center = 0.25 * (
                    values[i, j] + values[i + 1, j] + values[i + 1, j + 1] + values[i, j + 1]
                )
                center_below = center < level
                if idx == 5:
                    pairs = ((3, 2), (1, 0)) if center_below else ((3, 0), (1, 2))
                else:
                    pairs = ((0, 3), (2, 1)) if center_below else ((0, 1), (2, 3))
            for ea, eb in pairs:
                segs.append((cell_edge_key(ea, i, j), cell_edge_key(eb, i, j)))

    # chain segments on exact edge keys
    adj: dict[tuple, list] = {}
    for a, b in segs:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)

    visited = set()
    polylines, closed_flags = [], []

    def walk(start):
        chain = [start]
        visited.add(start)
        cur = start
        while True:
            nxt = [x for x in adj[cur] if x not in visited]
            if not nxt:
                break
            cur = nxt[0]
            visited.add(cur)
            chain.append(cur)
        return chain

    endpoints = [k for k, v in adj.items() if len(v) == 1]
    for start in endpoints:
        if start in visited:
            continue
        chain = walk(start)
        polylines.append(np.array([edge_pts[k] for k in chain]))
        closed_flags.append(False)
    for start in adj:
        if start in visited:
            continue
        chain = walk(start)
        is_closed = chain[0] in adj[chain[-1]] and len(chain) > 2
        polylines.append(np.array([edge_pts[k] for k in chain]))
        closed_flags.append(is_closed)
    return ContourSet2D(level=level, polylines=polylines, closed=closed_flags)


def margin_field_2d(spec: VineSpec3D, pair: str | int, grid: GridSpec) -> np.ndarray:
    """Bivariate z-scale margin density on a 2-D grid.

    Pairs "12" and "23" are products of the explicit pair density and the
    normal weights; pair "13" integrates the trivariate density over u2.
    """
    pair = str(pair)
    if pair not in ("12", "23", "13"):
        raise DomainError("pair must be one of 12, 23, 13")
    if grid.dim != 2:
        raise DomainError("margin_field_2d requires a 2-D grid")
    za, zb = np.meshgrid(*grid.axes(), indexing="ij")
    ua, ub = special.ndtr(za), special.ndtr(zb)
    w = _norm_pdf(za) * _norm_pdf(zb)
    # pair labels refer to original variables; map them through the fitted
    # structure's order into vine positions
    a, b = int(pair[0]), int(pair[1])
    pos = {var: i + 1 for i, var in enumerate(spec.order)}
    pa, pb = pos[a], pos[b]
    (pa, ua_), (pb, ub_) = sorted([(pa, ua), (pb, ub)])
    if (pa, pb) == (1, 2):
        return spec.c12.pdf(ua_, ub_) * w
    if (pa, pb) == (2, 3):
        return spec.c23.pdf(ua_, ub_) * w
    # tolerance on the weighted margin, as in marginal13_pdf_z
    tol = 1e-5 / np.maximum(w, 1e-12)
    return spec.marginal13_pdf(ua_, ub_, tol=tol) * w


def marching_squares(
    spec: VineSpec3D,
    pair: str | int,
    grid: GridSpec | None = None,
    levels: tuple[float, ...] = DEFAULT_LEVELS,
) -> list[ContourSet2D]:
    """Contour polylines of a bivariate margin at each level."""
    grid = grid or GridSpec.square()
    if any(lv <= 0 for lv in levels):
        raise DomainError("levels must be positive")
    vals = margin_field_2d(spec, pair, grid)
    return [contour_lines(grid, vals, lv) for lv in levels]


# ---------------------------------------------------------------------------
# export / import


def export_mesh(mesh: IsoMesh, fmt: str = "obj") -> bytes:
    fmt = fmt.lower()
    if fmt == "obj":
        return _export_obj([mesh]).encode()
    if fmt == "json":
        return json.dumps(mesh.to_json()).encode()
    raise DomainError(f"unknown mesh format {fmt!r}")


def _fmt6(x: float) -> str:
    return f"{x:.6g}"


def _export_obj(meshes: list[IsoMesh], group_names: list[str] | None = None) -> str:
    buf = io.StringIO()
    base = 1
    for m_idx, mesh in enumerate(meshes):
        name = group_names[m_idx] if group_names else None
        buf.write(f"# level {_fmt6(mesh.level)}\n")
        if name:
            buf.write(f"g {name}\n")
        for v in mesh.vertices:
            buf.write(f"v {_fmt6(v[0])} {_fmt6(v[1])} {_fmt6(v[2])}\n")
        for vn in mesh.normals:
            buf.write(f"vn {_fmt6(vn[0])} {_fmt6(vn[1])} {_fmt6(vn[2])}\n")
        for t in mesh.triangles:
            a, b, c = (int(x) + base for x in t)
            buf.write(f"f {a}//{a} {b}//{b} {c}//{c}\n")
        base += mesh.vertices.shape[0]
    return buf.getvalue()


def export_obj_multi(meshes: list[IsoMesh]) -> str:
    return _export_obj(meshes, [f"level_{_fmt6(m.level)}" for m in meshes])


def read_obj(data: bytes | str) -> IsoMesh:
    """Parse a single-mesh OBJ produced by :func:`export_mesh`."""
    text = data.decode() if isinstance(data, bytes) else data
    level = 0.0
    verts, normals, tris = [], [], []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "#" and len(parts) >= 3 and parts[1] == "level":
            level = float(parts[2])
        elif parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "vn":
            normals.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            tris.append([int(p.split("/")[0]) - 1 for p in parts[1:4]])
    return IsoMesh(
        level=level,
        vertices=np.array(verts, dtype=float).reshape(-1, 3),
        normals=np.array(normals, dtype=float).reshape(-1, 3),
        triangles=np.array(tris, dtype=np.int64).reshape(-1, 3),
    )


def mesh_bundle(
    spec_json: dict,
    grid: GridSpec,
    meshes: list[IsoMesh],
    quantize_above: int = 200_000,
) -> dict:
    """Multi-level bundle consumed by the service and viewer.

    Meshes whose vertex count exceeds ``quantize_above`` get their coordinates
    quantized to float32 to bound the payload; the flag records it.
    """
    out_levels = []
    for m in meshes:
        quantized = m.vertices.shape[0] > quantize_above
        verts = m.vertices.astype(np.float32).astype(float) if quantized else m.vertices
        norms = m.normals.astype(np.float32).astype(float) if quantized else m.normals
        out_levels.append(
            {
                "level": m.level,
                "quantized": quantized,
                "mesh": {
                    "level": m.level,
                    "vertices": verts.tolist(),
                    "normals": norms.tolist(),
                    "triangles": m.triangles.tolist(),
                },
            }
        )
    return {"levels": out_levels, "grid": grid.to_json(), "spec": spec_json}
