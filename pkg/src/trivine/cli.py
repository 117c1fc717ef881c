"""Command-line interface for batch workflows.

Exit codes: 0 success, 2 usage error (argparse), 1 runtime error. Every
randomized subcommand takes a --seed flag; identical invocations with the
same seed reproduce the same summary statistics.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import scenarios as scen
from .errors import TrivineError
from .estimate import fit_nonsimplified_binned, fit_simplified_vine, simplified_approx
from .field import (
    DEFAULT_LEVELS,
    GridSpec,
    export_obj_multi,
    marching_cubes,
    marching_squares,
    mesh_bundle,
    sample_density,
)
from .kde import kde_fit, load_sample_csv, normal_scores, rank_transform
from .vine import SampleMatrix, VineSpec3D


def _load_spec(args) -> VineSpec3D:
    if getattr(args, "scenario", None):
        return scen.get(args.scenario).spec
    with open(args.spec, "r", encoding="utf-8") as fh:
        return VineSpec3D.from_json(json.load(fh))


def _add_spec_source(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--scenario", help="built-in scenario id (see `scenarios`)")
    g.add_argument("--spec", help="path to a vine-spec JSON file")


def _parse_levels(text: str) -> tuple[float, ...]:
    levels = tuple(float(x) for x in text.split(","))
    if any(lv <= 0 for lv in levels) or list(levels) != sorted(levels):
        raise TrivineError("levels must be positive and ascending")
    return levels


def _grid3(args) -> GridSpec:
    lo, hi = args.box
    return GridSpec.cube(lo, hi, args.grid)


def _box(text: str) -> tuple[float, float]:
    lo, hi = (float(x) for x in text.split(","))
    return lo, hi


def _write(path: str, data: str | bytes):
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(path, mode) as fh:
        fh.write(data)


def _cmd_scenarios(args) -> int:
    rows = [(e.id, e.spec.c12.family.value, e.spec.c23.family.value,
             e.spec.c13_2.family.value,
             "simplified" if e.spec.is_simplified else "non-simplified")
            for e in scen.list_entries()]
    widths = [max(len(r[i]) for r in rows + [("id", "c12", "c23", "c13|2", "kind")])
              for i in range(5)]
    header = ("id", "c12", "c23", "c13|2", "kind")
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return 0


def _cmd_contour3d(args) -> int:
    spec = _load_spec(args)
    grid = _grid3(args)
    fld = sample_density(spec, grid)
    meshes = [marching_cubes(fld, lv) for lv in args.levels]
    if args.out.endswith(".obj"):
        _write(args.out, export_obj_multi(meshes))
    else:
        _write(args.out, json.dumps(mesh_bundle(spec.to_json(), grid, meshes)))
    for m in meshes:
        print(f"level {m.level:g}: {m.vertices.shape[0]} vertices, "
              f"{m.triangles.shape[0]} triangles")
    return 0


def _cmd_contour2d(args) -> int:
    spec = _load_spec(args)
    lo, hi = args.box
    grid = GridSpec.square(lo, hi, args.grid)
    contours = marching_squares(spec, args.pair, grid, args.levels)
    out = {"pair": args.pair, "grid": grid.to_json(),
           "contours": [c.to_json() for c in contours]}
    _write(args.out, json.dumps(out))
    print(f"pair {args.pair}: {sum(len(c.polylines) for c in contours)} polylines "
          f"at {len(args.levels)} levels")
    return 0


def _cmd_tau_curve(args) -> int:
    spec = _load_spec(args)
    grid = np.linspace(0.0, 1.0, args.points + 2)[1:-1]
    tau = spec.tau_curve(grid)
    payload = json.dumps({"u2": grid.tolist(), "tau": tau.tolist()})
    if args.out == "-":
        print(payload)
    else:
        _write(args.out, payload)
        print(f"tau curve on {args.points} points: min {tau.min():.3f} max {tau.max():.3f}")
    return 0


def _cmd_simulate(args) -> int:
    spec = _load_spec(args)
    sample = spec.simulate(args.n, args.seed)
    if args.scale == "z":
        sample = SampleMatrix(normal_scores(sample.data), scale="normal",
                              provenance="simulated")
    _write(args.out, sample.to_csv())
    print(f"wrote {sample.n} rows ({args.scale} scale) to {args.out}")
    return 0


def _cmd_fit(args) -> int:
    raw = load_sample_csv(args.data)
    u = raw if args.ranks == "none" else rank_transform(raw)
    if args.mode == "simplified":
        spec = fit_simplified_vine(u)
        out = {"spec": spec.to_json()}
    else:
        spec, curve = fit_nonsimplified_binned(
            u, bins=args.bins, bootstrap=args.bootstrap, seed=args.seed
        )
        out = {"spec": spec.to_json(), "tau_curve": curve.to_json()}
    _write(args.out, json.dumps(out))
    print(f"fitted {args.mode} vine (conditioning on variable "
          f"{spec.order[1]}) -> {args.out}")
    return 0


def _cmd_approx(args) -> int:
    spec = _load_spec(args)
    fitted = simplified_approx(spec, n=args.n, seed=args.seed)
    cond = fitted.c13_2.as_copula()
    out = {
        "spec": fitted.to_json(),
        "conditional": {**cond.to_json(), "tau": cond.tau()},
        "n": args.n,
        "seed": args.seed,
    }
    _write(args.out, json.dumps(out))
    print(f"conditional fit: {cond.family.value} rot={cond.rotation} "
          f"params={tuple(round(p, 4) for p in cond.params)} tau={cond.tau():.3f}")
    return 0


def _cmd_kde(args) -> int:
    raw = load_sample_csv(args.data)
    z = raw if args.ranks == "none" else normal_scores(rank_transform(raw))
    est = kde_fit(z)
    grid = _grid3(args)
    fld = est.evaluate_grid(grid)
    meshes = [marching_cubes(fld, lv) for lv in args.levels]
    if args.out.endswith(".obj"):
        _write(args.out, export_obj_multi(meshes))
    else:
        _write(args.out, json.dumps(mesh_bundle({"kde": True, "n": z.shape[0]},
                                                grid, meshes)))
    print(f"kde on {z.shape[0]} rows; field max {fld.values.max():.4f}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trivine",
                                description="Trivariate vine copula engine")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("scenarios", help="list built-in scenarios")
    sp.set_defaults(func=_cmd_scenarios)

    sp = sub.add_parser("contour3d", help="density contour surfaces to OBJ/JSON")
    _add_spec_source(sp)
    sp.add_argument("--levels", type=_parse_levels, default=DEFAULT_LEVELS)
    sp.add_argument("--grid", type=int, default=96)
    sp.add_argument("--box", type=_box, default=(-3.0, 3.0))
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_contour3d)

    sp = sub.add_parser("contour2d", help="bivariate margin contour lines to JSON")
    _add_spec_source(sp)
    sp.add_argument("--pair", choices=("12", "23", "13"), required=True)
    sp.add_argument("--levels", type=_parse_levels, default=DEFAULT_LEVELS)
    sp.add_argument("--grid", type=int, default=96)
    sp.add_argument("--box", type=_box, default=(-3.0, 3.0))
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_contour2d)

    sp = sub.add_parser("tau-curve", help="conditional Kendall's-tau curve")
    _add_spec_source(sp)
    sp.add_argument("--points", type=int, default=101)
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=_cmd_tau_curve)

    sp = sub.add_parser("simulate", help="draw a sample to CSV")
    _add_spec_source(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--scale", choices=("uniform", "z"), default="uniform")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("fit", help="fit a vine to CSV data")
    sp.add_argument("--data", required=True)
    sp.add_argument("--mode", choices=("simplified", "nonsimplified"),
                    default="simplified")
    sp.add_argument("--bins", type=int, default=8)
    sp.add_argument("--bootstrap", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--ranks", choices=("apply", "none"), default="apply",
                    help="apply the rank transform (default) or trust the input scale")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_fit)

    sp = sub.add_parser("approx", help="simplified approximation of a model")
    _add_spec_source(sp)
    sp.add_argument("--n", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_approx)

    sp = sub.add_parser("kde", help="kernel density contours from CSV data")
    sp.add_argument("--data", required=True)
    sp.add_argument("--ranks", choices=("apply", "none"), default="apply")
    sp.add_argument("--levels", type=_parse_levels, default=DEFAULT_LEVELS)
    sp.add_argument("--grid", type=int, default=96)
    sp.add_argument("--box", type=_box, default=(-3.0, 3.0))
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_kde)

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8720)
    sp.set_defaults(func=_cmd_serve)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TrivineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
