"""Trivariate pair-copula construction.

The density factorizes through the conditional distribution of the outer
variables given the middle one:

    c(u1, u2, u3) = c_cond(C(u1|u2), C(u3|u2); u2) * c12(u1, u2) * c23(u2, u3)

with the conditional pair either constant (a simplified model) or driven by
parameter functions of u2 (non-simplified). The conditioning variable is
always the second position; other decomposition orders are handled by
relabeling the inputs through the ``order`` field.

Specs are immutable; density, margin and tau-curve evaluation are pure and
concurrently callable, and simulation is a pure function of (spec, n, seed).
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy import special

from .errors import DomainError, InvalidParams, QuadratureWarning
from .families import (
    EPS,
    POSITIVE_FIRST_PARAM,
    ROTATIONS,
    BivariateCopula,
    Family,
    family_h1,
    family_hinv1,
    family_pdf,
    family_tau,
)
from .quadrature import gauss_legendre_01

_SQRT2PI = math.sqrt(2.0 * math.pi)


def _norm_pdf(z):
    return np.exp(-0.5 * np.asarray(z) ** 2) / _SQRT2PI


class ParamForm(str, Enum):
    CONSTANT = "constant"
    SINE = "sine"
    QUADRATIC = "quadratic"
    EXP_SATURATION = "exp_saturation"
    ARCTAN = "arctan"
    SIGN_COSINE = "sign_cosine"
    LINEAR = "linear"
    PIECEWISE_LINEAR = "piecewise_linear"


_FORM_ARITY = {
    ParamForm.CONSTANT: 1,
    ParamForm.SINE: 1,
    ParamForm.QUADRATIC: 3,
    ParamForm.EXP_SATURATION: 1,
    ParamForm.ARCTAN: 3,
    ParamForm.SIGN_COSINE: 3,
    ParamForm.LINEAR: 2,
}


@dataclass(frozen=True)
class ParamFunction:
    """Functional form theta(u2) for a conditional copula parameter.

    The piecewise-linear form interpolates fitted knot values on a transformed
    scale ("fisher_z" for correlation-type parameters, "log" for positive
    shape parameters) and extrapolates flat beyond the outer knots.
    """

    form: ParamForm
    coeffs: tuple[float, ...]
    knots: tuple[float, ...] = ()
    scale: str = "identity"

    def __post_init__(self):
        form = ParamForm(self.form)
        object.__setattr__(self, "form", form)
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        object.__setattr__(self, "knots", tuple(float(k) for k in self.knots))
        if form is ParamForm.PIECEWISE_LINEAR:
            if len(self.knots) != len(self.coeffs) or len(self.knots) < 1:
                raise InvalidParams("piecewise_linear needs matching knots and values")
            if np.any(np.diff(self.knots) <= 0):
                raise InvalidParams("piecewise_linear knots must be strictly increasing")
            if self.scale not in ("identity", "fisher_z", "log"):
                raise InvalidParams(f"unknown interpolation scale {self.scale!r}")
        elif len(self.coeffs) != _FORM_ARITY[form]:
            raise InvalidParams(
                f"{form.value} takes {_FORM_ARITY[form]} coefficient(s), got {len(self.coeffs)}"
            )

    @property
    def is_constant(self) -> bool:
        return self.form is ParamForm.CONSTANT

    def __call__(self, u2) -> np.ndarray:
        u = np.asarray(u2, dtype=float)
        c = self.coeffs
        if self.form is ParamForm.CONSTANT:
            return np.full(u.shape, c[0])
        if self.form is ParamForm.SINE:
            return c[0] * np.sin(2.0 * math.pi * u)
        if self.form is ParamForm.QUADRATIC:
            return c[0] * (-((u - c[1]) ** 2) + c[2])
        if self.form is ParamForm.EXP_SATURATION:
            return -np.expm1(-c[0] * u)
        if self.form is ParamForm.ARCTAN:
            return c[0] * np.arctan(c[1] * (u - c[2]))
        if self.form is ParamForm.SIGN_COSINE:
            return np.sign(u - 0.5) * (c[0] - c[1] * np.cos(2.0 * math.pi * c[2] * u))
        if self.form is ParamForm.LINEAR:
            return c[0] + c[1] * u
        # piecewise linear on the transformed scale, flat outside the knots
        y = np.asarray(self.coeffs)
        if self.scale == "fisher_z":
            ty = np.arctanh(np.clip(y, -1 + 1e-12, 1 - 1e-12))
            return np.tanh(np.interp(u, self.knots, ty))
        if self.scale == "log":
            return np.exp(np.interp(u, self.knots, np.log(np.maximum(y, 1e-300))))
        return np.interp(u, self.knots, y)

    def to_json(self) -> dict:
        out: dict = {"form": self.form.value, "coeffs": list(self.coeffs)}
        if self.form is ParamForm.PIECEWISE_LINEAR:
            out["knots"] = list(self.knots)
            out["scale"] = self.scale
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ParamFunction":
        return cls(
            form=ParamForm(obj["form"]),
            coeffs=tuple(obj.get("coeffs", ())),
            knots=tuple(obj.get("knots", ())),
            scale=obj.get("scale", "identity"),
        )

    @classmethod
    def constant(cls, value: float) -> "ParamFunction":
        return cls(ParamForm.CONSTANT, (float(value),))


# Families whose dependence vanishes as the first parameter approaches the
# *lower* end of its space: magnitudes at or below the floor evaluate as the
# independence copula (both one-sided limits of a sign crossing agree there).
_INDEP_FLOOR = {
    Family.CLAYTON: 1e-8,
    Family.FRANK: 1e-8,
    Family.AMH: 0.0,
}

# Families whose first parameter has 1 as the independence end of its space;
# magnitudes below 1 are clamped onto that boundary (exact zeros included, so
# a sign crossing passes through independence).
_UNIT_BOUNDARY = {Family.GUMBEL, Family.JOE, Family.BB6, Family.BB8, Family.TAWN1, Family.TAWN2}


@dataclass(frozen=True)
class ConditionalPair:
    """Conditional pair-copula c(v, w; u2), possibly parameter-driven by u2.

    When ``sign_rotation`` is set, negative values of the driving (first)
    parameter function select the rotated family with the absolute parameter;
    an exact zero evaluates as the independence copula.
    """

    family: Family
    base_rotation: int = 0
    param_fns: tuple[ParamFunction, ...] = ()
    sign_rotation: int | None = None

    def __post_init__(self):
        if self.base_rotation not in ROTATIONS:
            raise InvalidParams("base_rotation must be one of 0/90/180/270")
        if self.sign_rotation is not None and self.sign_rotation not in ROTATIONS:
            raise InvalidParams("sign_rotation must be one of 0/90/180/270")
        object.__setattr__(self, "param_fns", tuple(self.param_fns))
        from .families import PARAM_SPACE

        if len(self.param_fns) != len(PARAM_SPACE[self.family]):
            raise InvalidParams(
                f"{self.family.value} needs {len(PARAM_SPACE[self.family])} parameter function(s)"
            )

    @property
    def is_simplified(self) -> bool:
        return all(fn.is_constant for fn in self.param_fns)

    @classmethod
    def constant(cls, cop: BivariateCopula) -> "ConditionalPair":
        return cls(
            family=cop.family,
            base_rotation=cop.rotation,
            param_fns=tuple(ParamFunction.constant(p) for p in cop.params),
        )

    def as_copula(self) -> BivariateCopula:
        if not self.is_simplified:
            raise InvalidParams("only a constant conditional pair is a single copula")
        return BivariateCopula(
            self.family, self.base_rotation, tuple(fn.coeffs[0] for fn in self.param_fns)
        )

    def params_at(self, u2) -> tuple[np.ndarray, ...]:
        """Parameter values used at each u2 (sign rule not yet applied)."""
        u = np.asarray(u2, dtype=float)
        return tuple(np.broadcast_to(fn(u), u.shape).astype(float) for fn in self.param_fns)

    # -- branch bookkeeping --------------------------------------------------
    def _branches(self, u2: np.ndarray):
        """Split u2 into (positive, sign-rotated, independence) branches.

        Returns boolean masks plus the parameter arrays with the driving
        parameter replaced by its magnitude (clamped into the family space).
        """
        params = [np.array(p, dtype=float) for p in self.params_at(u2)]
        fam = self.family
        if fam is Family.INDEPENDENCE:
            none = np.zeros(u2.shape, bool)
            return none, params, none.copy(), np.ones(u2.shape, bool)
        driving = params[0]

        if fam in POSITIVE_FIRST_PARAM:
            neg = driving < 0.0
            if np.any(neg) and self.sign_rotation is None:
                raise InvalidParams(
                    f"{fam.value} parameter function turns negative without a sign rotation"
                )
            mag = np.abs(driving)
        else:
            neg = np.zeros(u2.shape, bool)
            mag = driving

        indep = np.zeros(u2.shape, bool)
        if fam in _UNIT_BOUNDARY:
            # theta = 1 is the independence member for these families; the
            # kernels evaluate it exactly, so the clamp alone totalizes.
            mag = np.maximum(mag, 1.0)
        else:
            floor = _INDEP_FLOOR.get(fam)
            if floor is not None:
                indep = np.abs(mag) <= floor
        params[0] = mag
        pos = ~neg & ~indep
        neg = neg & ~indep
        return pos, params, neg, indep

    def _apply(self, fn, indep_value, u2, *args):
        arrs = np.broadcast_arrays(
            np.asarray(u2, dtype=float), *[np.asarray(a, dtype=float) for a in args]
        )
        shape = arrs[0].shape
        u2b = np.atleast_1d(arrs[0])
        args_b = [np.atleast_1d(a) for a in arrs[1:]]
        pos, params, neg, indep = self._branches(u2b)
        out = np.empty(u2b.shape, dtype=float)
        if np.any(pos):
            out[pos] = fn(
                self.family,
                self.base_rotation,
                tuple(p[pos] for p in params),
                *(a[pos] for a in args_b),
            )
        if np.any(neg):
            out[neg] = fn(
                self.family,
                int(self.sign_rotation),
                tuple(p[neg] for p in params),
                *(a[neg] for a in args_b),
            )
        if np.any(indep):
            out[indep] = indep_value(*(a[indep] for a in args_b))
        return out.reshape(shape)

    # -- conditional-copula operations ----------------------------------------
    def pdf(self, v, w, u2):
        return self._apply(family_pdf, lambda v_, w_: np.ones_like(v_), u2, v, w)

    def hfunc1(self, v, w, u2):
        """Conditional CDF of w given v under the u2-local copula."""
        return self._apply(family_h1, lambda v_, w_: w_, u2, v, w)

    def hinv1(self, p, v, u2):
        return self._apply(family_hinv1, lambda p_, v_: p_, u2, p, v)

    def tau_at(self, u2) -> np.ndarray:
        """Kendall's tau of the u2-local conditional copula, per grid point."""
        u2 = np.atleast_1d(np.asarray(u2, dtype=float))
        pos, params, neg, indep = self._branches(u2)
        base = np.zeros(u2.shape, dtype=float)
        closed = _closed_tau_vectorized(self.family, params)
        if closed is not None:
            base = np.asarray(closed, dtype=float)
        else:
            for i in np.flatnonzero(pos | neg):
                base.flat[i] = family_tau(
                    self.family, 0, tuple(p.flat[i] for p in params)
                )
        sign_pos = -1.0 if self.base_rotation in (90, 270) else 1.0
        sign_neg = -1.0 if self.sign_rotation in (90, 270) else 1.0
        out = np.zeros(u2.shape, dtype=float)
        out[pos] = sign_pos * base[pos]
        out[neg] = sign_neg * base[neg]
        return out

    def to_json(self) -> dict:
        out = {
            "family": self.family.value,
            "base_rotation": self.base_rotation,
            "param_fns": [fn.to_json() for fn in self.param_fns],
        }
        if self.sign_rotation is not None:
            out["sign_rotation"] = self.sign_rotation
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ConditionalPair":
        return cls(
            family=Family(obj["family"]),
            base_rotation=int(obj.get("base_rotation", 0)),
            param_fns=tuple(ParamFunction.from_json(p) for p in obj.get("param_fns", ())),
            sign_rotation=obj.get("sign_rotation"),
        )


def _closed_tau_vectorized(family: Family, params) -> np.ndarray | None:
    if family in (Family.GAUSSIAN, Family.STUDENT_T):
        return 2.0 / math.pi * np.arcsin(np.clip(params[0], -1.0, 1.0))
    if family is Family.CLAYTON:
        return params[0] / (params[0] + 2.0)
    if family is Family.GUMBEL:
        return 1.0 - 1.0 / params[0]
    return None


class Margins(str, Enum):
    UNIFORM = "uniform"
    STD_NORMAL = "std_normal"


@dataclass(frozen=True)
class SampleMatrix:
    """N x 3 observations with scale and provenance metadata."""

    data: np.ndarray
    scale: str = "uniform"  # "uniform" | "normal"
    provenance: str = "simulated"  # "simulated" | "ingested"

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise DomainError("SampleMatrix requires an N x 3 array")
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def to_csv(self) -> str:
        header = ("u1", "u2", "u3") if self.scale == "uniform" else ("z1", "z2", "z3")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in self.data:
            writer.writerow([f"{x:.17g}" for x in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, provenance: str = "ingested") -> "SampleMatrix":
        from .kde import read_csv_columns

        data, header = read_csv_columns(text)
        scale = "uniform" if header and header[0].lower().startswith("u") else "normal"
        return cls(data=data, scale=scale, provenance=provenance)


@dataclass(frozen=True)
class VineSpec3D:
    """Full trivariate model: two unconditional pairs plus the conditional pair.

    ``order`` records the mapping from data columns to vine positions when a
    fitted structure conditioned on a variable other than the middle one; the
    default (1, 2, 3) is the identity labeling.
    """

    c12: BivariateCopula
    c23: BivariateCopula
    c13_2: ConditionalPair
    margins: Margins = Margins.STD_NORMAL
    order: tuple[int, int, int] = (1, 2, 3)

    def __post_init__(self):
        object.__setattr__(self, "margins", Margins(self.margins))
        if sorted(self.order) != [1, 2, 3]:
            raise InvalidParams("order must be a permutation of (1, 2, 3)")

    @property
    def is_simplified(self) -> bool:
        return self.c13_2.is_simplified

    # -- core density ------------------------------------------------------
    def _density_pos(self, p1, p2, p3):
        """Density in vine-position coordinates (p2 is the conditioning slot)."""
        v = self.c12.hfunc2(p1, p2)
        w = self.c23.hfunc1(p2, p3)
        return (
            self.c13_2.pdf(v, w, p2)
            * self.c12.pdf(p1, p2)
            * self.c23.pdf(p2, p3)
        )

    def density_u(self, u1, u2, u3):
        """Copula density at uniform-scale points, in original variable order.

        For a fitted structure with a permuted ``order``, the arguments are
        relabeled into vine positions here, so callers always pass their data
        columns as-is.
        """
        args = list(np.broadcast_arrays(
            np.asarray(u1, dtype=float), np.asarray(u2, dtype=float), np.asarray(u3, dtype=float)
        ))
        for name, u in zip(("u1", "u2", "u3"), args):
            if np.any(u < 0.0) or np.any(u > 1.0) or not np.all(np.isfinite(u)):
                raise DomainError(f"{name} outside [0, 1]")
        p1, p2, p3 = (args[j - 1] for j in self.order)
        return self._density_pos(p1, p2, p3)

    def density_z(self, z1, z2, z3):
        """Joint density on the standard-normal-margin scale."""
        if self.margins is not Margins.STD_NORMAL:
            raise DomainError("density_z requires std_normal margins")
        z1, z2, z3 = (np.asarray(z, dtype=float) for z in (z1, z2, z3))
        u1, u2, u3 = special.ndtr(z1), special.ndtr(z2), special.ndtr(z3)
        return self.density_u(u1, u2, u3) * _norm_pdf(z1) * _norm_pdf(z2) * _norm_pdf(z3)

    # -- implied 1-3 margin --------------------------------------------------
    def marginal13_pdf(self, u1, u3, nodes: int = 64, tol=1e-5, max_depth: int = 5):
        """Density of the implied margin of the two outer vine positions.

        Arguments are in vine-position coordinates (for the default order,
        original variables 1 and 3); the conditioning position is integrated.

        Fixed Gauss-Legendre per interval with adaptive bisection refinement:
        the integration interval is halved (only for the points still in
        disagreement) until successive estimates agree within ``tol`` or the
        depth cap is hit, in which case :class:`QuadratureWarning` carries the
        remaining error estimate and the refined value is returned anyway.
        ``tol`` broadcasts over the evaluation points, so callers weighting
        the margin afterwards can loosen it where the weight is negligible.
        """
        u1b, u3b, tolb = np.broadcast_arrays(
            np.asarray(u1, dtype=float),
            np.asarray(u3, dtype=float),
            np.asarray(tol, dtype=float),
        )
        shape = u1b.shape
        u1f = np.atleast_1d(u1b.reshape(-1))
        u3f = np.atleast_1d(u3b.reshape(-1))
        tolf = np.atleast_1d(tolb.reshape(-1))

        def level_sum(idx: np.ndarray, n_panels: int) -> np.ndarray:
            edges = np.linspace(0.0, 1.0, n_panels + 1)
            total = np.zeros(idx.size)
            for lo, hi in zip(edges[:-1], edges[1:]):
                x, w = gauss_legendre_01(nodes, lo, hi)
                vals = self._density_pos(u1f[idx, None], x[None, :], u3f[idx, None])
                total += vals @ w
            return total

        active = np.arange(u1f.size)
        result = level_sum(active, 1)
        last_diff = np.zeros(0)
        for depth in range(1, max_depth + 1):
            cur = level_sum(active, 2**depth)
            diff = np.abs(cur - result[active])
            result[active] = cur
            still = diff > tolf[active]
            active, last_diff = active[still], diff[still]
            if active.size == 0:
                break
        if active.size:
            warnings.warn(
                f"margin quadrature refinement cap reached; error estimate "
                f"{float(np.max(last_diff)):.3e}",
                QuadratureWarning,
            )
        return result.reshape(shape)

    def marginal13_pdf_z(self, z1, z3, nodes: int = 64):
        if self.margins is not Margins.STD_NORMAL:
            raise DomainError("z-scale margin requires std_normal margins")
        z1, z3 = np.asarray(z1, dtype=float), np.asarray(z3, dtype=float)
        weight = _norm_pdf(z1) * _norm_pdf(z3)
        # the tolerance applies to the weighted margin: grid corners map to
        # extreme quantiles whose boundary-layer integrand would otherwise
        # demand refinement their negligible weight cannot justify
        tol = 1e-5 / np.maximum(weight, 1e-12)
        vals = self.marginal13_pdf(
            special.ndtr(z1), special.ndtr(z3), nodes=nodes, tol=tol
        )
        return vals * weight

    # -- conditional Kendall's tau -------------------------------------------
    def tau_curve(self, grid: Sequence[float]) -> np.ndarray:
        grid = np.asarray(grid, dtype=float)
        if np.any(grid <= 0.0) or np.any(grid >= 1.0):
            raise DomainError("tau_curve grid points must be interior")
        return self.c13_2.tau_at(grid)

    # -- simulation ------------------------------------------------------------
    def simulate(self, n: int, seed: int = 0) -> SampleMatrix:
        """Rosenblatt inversion draw, deterministic for a fixed seed."""
        if n < 1:
            raise DomainError("n must be >= 1")
        rng = np.random.Generator(np.random.Philox(int(seed)))
        wmat = np.clip(rng.random((int(n), 3)), EPS, 1.0 - EPS)
        u2 = wmat[:, 1]
        u1 = self.c12.hinv2(wmat[:, 0], u2)
        v = wmat[:, 0]  # C(u1|u2) by construction of u1
        w = self.c13_2.hinv1(wmat[:, 2], v, u2)
        u3 = self.c23.hinv1(w, u2)
        data = np.column_stack([u1, u2, u3])
        inv = np.argsort(np.asarray(self.order) - 1)
        return SampleMatrix(data=data[:, inv], scale="uniform", provenance="simulated")

    def pseudo_obs(self, s: SampleMatrix) -> np.ndarray:
        """Conditional pseudo-observations (C(u1|u2), C(u3|u2)) as an N x 2 array."""
        if s.scale != "uniform":
            raise DomainError("pseudo_obs expects a uniform-scale sample")
        cols = np.asarray(self.order) - 1
        u1, u2, u3 = (s.data[:, cols[i]] for i in range(3))
        return np.column_stack([self.c12.hfunc2(u1, u2), self.c23.hfunc1(u2, u3)])

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        out = {
            "margins": self.margins.value,
            "c12": self.c12.to_json(),
            "c23": self.c23.to_json(),
            "c13_2": self.c13_2.to_json(),
        }
        if self.order != (1, 2, 3):
            out["order"] = list(self.order)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "VineSpec3D":
        return cls(
            c12=BivariateCopula.from_json(obj["c12"]),
            c23=BivariateCopula.from_json(obj["c23"]),
            c13_2=ConditionalPair.from_json(obj["c13_2"]),
            margins=Margins(obj.get("margins", "std_normal")),
            order=tuple(obj.get("order", (1, 2, 3))),
        )


def simplified(
    c12: BivariateCopula,
    c23: BivariateCopula,
    c13_2: BivariateCopula,
    margins: Margins = Margins.STD_NORMAL,
) -> VineSpec3D:
    """Convenience constructor for a simplified model from three copulas."""
    return VineSpec3D(c12=c12, c23=c23, c13_2=ConditionalPair.constant(c13_2), margins=margins)
