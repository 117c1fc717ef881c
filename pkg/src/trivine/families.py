"""Parametric bivariate copula families.

Densities, CDFs, conditional distributions (h-functions) and their inverses,
quarter-turn rotations and Kendall's-tau conversion for the thirteen families
used as vine building blocks. All kernels broadcast over numpy arrays, both in
the copula arguments and in the parameters, so conditional copulas with
point-wise varying parameters evaluate in one vectorized call.

Conventions:
  * ``hfunc2(u1, u2)`` is the conditional CDF of the first argument given the
    second, i.e. the partial derivative of the copula CDF in its second slot;
    ``hfunc1`` conditions on the first argument.
  * Rotations act on the density as c90(u1,u2)=c(1-u2,u1),
    c180(u1,u2)=c(1-u1,1-u2), c270(u1,u2)=c(u2,1-u1).
  * Density and h-function arguments are clamped to [1e-10, 1-1e-10]; the CDF
    accepts the closed interval and is exact on the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy import special

from .errors import DomainError, InvalidParams, NonConvergence, OutOfRange, Unsupported
from .quadrature import debye1, gauss_legendre_01, gauss_legendre_unit_clustered

EPS = 1e-10
# Probability targets of inverse h-functions are clamped asymmetrically:
# small p stays representable down to the subnormal range, while 1 - p
# saturates at the float64 epsilon, so only the upper end needs slack.
P_LO = 1e-300
P_HI = 1.0 - 1e-16

ROTATIONS = (0, 90, 180, 270)


class Family(str, Enum):
    INDEPENDENCE = "independence"
    GAUSSIAN = "gaussian"
    STUDENT_T = "student_t"
    CLAYTON = "clayton"
    GUMBEL = "gumbel"
    FRANK = "frank"
    JOE = "joe"
    BB1 = "bb1"
    BB6 = "bb6"
    BB8 = "bb8"
    TAWN1 = "tawn1"
    TAWN2 = "tawn2"
    AMH = "amh"


# Families whose first parameter is positive by definition; negative-parameter
# shorthand for these canonicalizes to a rotation at parse time.
POSITIVE_FIRST_PARAM = frozenset(
    {
        Family.CLAYTON,
        Family.GUMBEL,
        Family.JOE,
        Family.BB1,
        Family.BB6,
        Family.BB8,
        Family.TAWN1,
        Family.TAWN2,
        Family.AMH,
    }
)

# (name, lower, upper, lower_inclusive, upper_inclusive) per parameter.
_INF = math.inf
PARAM_SPACE: dict[Family, tuple[tuple[str, float, float, bool, bool], ...]] = {
    Family.INDEPENDENCE: (),
    Family.GAUSSIAN: (("rho", -1.0, 1.0, False, False),),
    Family.STUDENT_T: (("rho", -1.0, 1.0, False, False), ("nu", 1.0, _INF, False, False)),
    Family.CLAYTON: (("theta", 0.0, _INF, False, False),),
    Family.GUMBEL: (("theta", 1.0, _INF, True, False),),
    Family.FRANK: (("theta", -_INF, _INF, False, False),),
    Family.JOE: (("theta", 1.0, _INF, False, False),),
    Family.BB1: (("theta", 0.0, _INF, False, False), ("delta", 1.0, _INF, True, False)),
    Family.BB6: (("theta", 1.0, _INF, True, False), ("delta", 1.0, _INF, True, False)),
    Family.BB8: (("theta", 1.0, _INF, True, False), ("delta", 0.0, 1.0, False, True)),
    Family.TAWN1: (("theta", 1.0, _INF, False, False), ("psi", 0.0, 1.0, False, False)),
    Family.TAWN2: (("theta", 1.0, _INF, False, False), ("psi", 0.0, 1.0, False, False)),
    Family.AMH: (("gamma", 0.0, 1.0, True, False),),
}


def validate_params(family: Family, params: tuple[float, ...]) -> None:
    space = PARAM_SPACE[family]
    if len(params) != len(space):
        raise InvalidParams(
            f"{family.value} takes {len(space)} parameter(s), got {len(params)}"
        )
    for value, (name, lo, hi, lo_inc, hi_inc) in zip(params, space):
        if not np.isfinite(value):
            raise InvalidParams(f"{family.value}: {name} must be finite")
        ok_lo = value >= lo if lo_inc else value > lo
        ok_hi = value <= hi if hi_inc else value < hi
        if not (ok_lo and ok_hi):
            raise InvalidParams(
                f"{family.value}: {name}={value} outside "
                f"{'[' if lo_inc else '('}{lo}, {hi}{']' if hi_inc else ')'}"
            )
    if family is Family.FRANK and params[0] == 0.0:
        raise InvalidParams("frank: theta must be nonzero (use independence)")


def canonicalize(
    family: Family, rotation: int, params: tuple[float, ...]
) -> tuple[Family, int, tuple[float, ...]]:
    """Resolve negative-first-parameter shorthand into an explicit rotation.

    A positive-dependence family written with a negative first parameter means
    its negative-dependence variant: the parameter is replaced by its absolute
    value and an unrotated (or survival) copula acquires the matching
    quarter-turn (0 -> 90, 180 -> 270); already quarter-turned copulas keep
    their rotation.
    """
    if rotation not in ROTATIONS:
        raise InvalidParams(f"rotation must be one of {ROTATIONS}, got {rotation}")
    if family in POSITIVE_FIRST_PARAM and params and params[0] < 0:
        params = (abs(params[0]),) + tuple(params[1:])
        rotation = {0: 90, 180: 270}.get(rotation, rotation)
    return family, rotation, tuple(float(p) for p in params)


# ---------------------------------------------------------------------------
# elementary helpers


def _asarr(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


def _clamp_interior(u: np.ndarray) -> np.ndarray:
    return np.clip(u, EPS, 1.0 - EPS)


def _check_unit(u, name: str, closed: bool = True) -> np.ndarray:
    arr = _asarr(u)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{name} outside [0, 1]")
    return arr


def _bisect_monotone(
    f: Callable[[np.ndarray], np.ndarray],
    target: np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> np.ndarray:
    """Vectorized bisection for an elementwise increasing f on (0, 1)."""
    target = _asarr(target)
    lo = np.full(target.shape, EPS)
    hi = np.full(target.shape, 1.0 - EPS)
    width = 1.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        below = f(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        width = 0.5 * width
        if width < tol:
            break
    else:
        if width > 1e-8:
            raise NonConvergence("bisection failed to bracket the h-function root")
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Gaussian

_ndtr = special.ndtr
_ndtri = special.ndtri


def _ga_pdf(u1, u2, rho):
    x = _ndtri(u1)
    y = _ndtri(u2)
    om = 1.0 - rho * rho
    return np.exp(-(rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * om)) / np.sqrt(om)


def _ga_cdf(u1, u2, rho):
    x = _ndtri(u1)
    y = _ndtri(u2)
    # Plackett identity: dC/drho is the bivariate normal density, so integrate
    # it from 0 to rho on a fixed rule (integrand is analytic for |rho| < 1).
    r, w = gauss_legendre_01(48)
    rr = np.asarray(rho)[..., None] * r
    om = 1.0 - rr * rr
    xx = x[..., None]
    yy = y[..., None]
    dens = np.exp(-(xx * xx - 2.0 * rr * xx * yy + yy * yy) / (2.0 * om)) / (
        2.0 * math.pi * np.sqrt(om)
    )
    return _ndtr(x) * _ndtr(y) + np.asarray(rho) * np.sum(w * dens, axis=-1)


def _ga_h2(u1, u2, rho):
    x = _ndtri(u1)
    y = _ndtri(u2)
    return _ndtr((x - rho * y) / np.sqrt(1.0 - rho * rho))


def _ga_hinv2(p, u2, rho):
    y = _ndtri(u2)
    return _ndtr(_ndtri(p) * np.sqrt(1.0 - rho * rho) + rho * y)


# ---------------------------------------------------------------------------
# Student t

_stdtr = special.stdtr
_stdtrit = special.stdtrit


def _t_pdf(u1, u2, rho, nu):
    x = _stdtrit(nu, u1)
    y = _stdtrit(nu, u2)
    om = 1.0 - rho * rho
    lc = (
        special.gammaln((nu + 2.0) / 2.0)
        + special.gammaln(nu / 2.0)
        - 2.0 * special.gammaln((nu + 1.0) / 2.0)
        - 0.5 * np.log(om)
    )
    lc = lc + 0.5 * (nu + 1.0) * (np.log1p(x * x / nu) + np.log1p(y * y / nu))
    lc = lc - 0.5 * (nu + 2.0) * np.log1p((x * x - 2.0 * rho * x * y + y * y) / (nu * om))
    return np.exp(lc)


def _t_h2(u1, u2, rho, nu):
    x = _stdtrit(nu, u1)
    y = _stdtrit(nu, u2)
    scale = np.sqrt((1.0 - rho * rho) * (nu + y * y) / (nu + 1.0))
    return _stdtr(nu + 1.0, (x - rho * y) / scale)


def _t_hinv2(p, u2, rho, nu):
    y = _stdtrit(nu, u2)
    x = rho * y + np.sqrt((1.0 - rho * rho) * (nu + y * y) / (nu + 1.0)) * _stdtrit(nu + 1.0, p)
    return _stdtr(nu, x)


def _t_cdf(u1, u2, rho, nu):
    # One-dimensional quadrature of the conditional-t representation,
    # C(u1,u2) = int_0^{u2} C_{1|2}(u1|q) dq, with nodes clustered at the
    # endpoints to absorb the quantile transform's edge behaviour.
    s, w = gauss_legendre_unit_clustered(128)
    u1b, u2b, rhob, nub = np.broadcast_arrays(
        np.asarray(u1), np.asarray(u2), np.asarray(rho), np.asarray(nu)
    )
    q = u2b[..., None] * s
    q = np.clip(q, EPS, 1.0 - EPS)
    h = _t_h2(np.asarray(u1b)[..., None], q, np.asarray(rhob)[..., None], np.asarray(nub)[..., None])
    return u2b * np.sum(w * h, axis=-1)


# ---------------------------------------------------------------------------
# Clayton


def _cl_pdf(u1, u2, th):
    lu = np.log(u1)
    lv = np.log(u2)
    s = np.exp(-th * lu) + np.exp(-th * lv) - 1.0
    logc = np.log1p(th) - (1.0 + th) * (lu + lv) - (2.0 + 1.0 / th) * np.log(s)
    return np.exp(logc)


def _cl_cdf(u1, u2, th):
    s = u1 ** (-th) + u2 ** (-th) - 1.0
    return s ** (-1.0 / th)


def _cl_h2(u1, u2, th):
    lu = np.log(u1)
    lv = np.log(u2)
    s = np.exp(-th * lu) + np.exp(-th * lv) - 1.0
    return np.exp(-(th + 1.0) * lv - (1.0 + 1.0 / th) * np.log(s))


def _cl_hinv2(p, u2, th):
    # Invert h2 in closed form: u1^-th = 1 + u2^-th * (p^(-th/(th+1)) - 1).
    t = np.exp(-th / (th + 1.0) * np.log(p))
    s = 1.0 + u2 ** (-th) * (t - 1.0)
    return np.clip(s ** (-1.0 / th), EPS, 1.0 - EPS)


# ---------------------------------------------------------------------------
# Gumbel


def _gu_parts(u1, u2, th):
    lnu = -np.log(u1)
    lnv = -np.log(u2)
    x = np.exp(th * np.log(lnu))
    y = np.exp(th * np.log(lnv))
    s = x + y
    return lnu, lnv, s


def _gu_pdf(u1, u2, th):
    lnu, lnv, s = _gu_parts(u1, u2, th)
    s = np.maximum(s, 1e-300)
    spow = np.exp(np.log(s) / th)
    logc = (
        -spow
        + (th - 1.0) * (np.log(lnu) + np.log(lnv))
        + (2.0 / th - 2.0) * np.log(s)
        + np.log1p((th - 1.0) / spow)
        - np.log(u1)
        - np.log(u2)
    )
    return np.exp(logc)


def _gu_cdf(u1, u2, th):
    _, _, s = _gu_parts(u1, u2, th)
    return np.exp(-np.exp(np.log(s) / th))


def _gu_h2(u1, u2, th):
    lnu, lnv, s = _gu_parts(u1, u2, th)
    s = np.maximum(s, 1e-300)
    spow = np.exp(np.log(s) / th)
    logh = -spow + (th - 1.0) * np.log(lnv) + (1.0 / th - 1.0) * np.log(s) - np.log(u2)
    return np.exp(logh)


# ---------------------------------------------------------------------------
# Frank


def _fr_pdf(u1, u2, th):
    a = np.expm1(-th)
    g1 = np.expm1(-th * u1)
    g2 = np.expm1(-th * u2)
    den = a + g1 * g2
    return -th * a * (g1 + 1.0) * (g2 + 1.0) / (den * den)


def _fr_cdf(u1, u2, th):
    a = np.expm1(-th)
    g1 = np.expm1(-th * u1)
    g2 = np.expm1(-th * u2)
    return -np.log1p(g1 * g2 / a) / th


def _fr_h2(u1, u2, th):
    a = np.expm1(-th)
    g1 = np.expm1(-th * u1)
    g2 = np.expm1(-th * u2)
    return g1 * (g2 + 1.0) / (a + g1 * g2)


def _fr_hinv2(p, u2, th):
    a = np.expm1(-th)
    g2 = np.expm1(-th * u2)
    g1 = p * a / (1.0 + g2 * (1.0 - p))
    return -np.log1p(g1) / th


# ---------------------------------------------------------------------------
# Joe


def _jo_parts(u1, u2, th):
    b1 = 1.0 - u1
    b2 = 1.0 - u2
    x = b1**th
    y = b2**th
    s = x + y - x * y
    return b1, b2, x, y, s


def _jo_pdf(u1, u2, th):
    # log scale with a floored s: extreme theta underflows x and y, and the
    # naive power expression would produce inf * 0 at the upper corner
    b1, b2, x, y, s = _jo_parts(u1, u2, th)
    s = np.maximum(s, 1e-300)
    logc = (
        (1.0 / th - 2.0) * np.log(s)
        + (th - 1.0) * (np.log(b1) + np.log(b2))
        + np.log(th - 1.0 + s)
    )
    return np.exp(logc)


def _jo_cdf(u1, u2, th):
    _, _, _, _, s = _jo_parts(u1, u2, th)
    return 1.0 - np.maximum(s, 1e-300) ** (1.0 / th)


def _jo_h2(u1, u2, th):
    _, b2, x, _, s = _jo_parts(u1, u2, th)
    s = np.maximum(s, 1e-300)
    with np.errstate(divide="ignore"):
        logh = (1.0 / th - 1.0) * np.log(s) + np.log1p(-x) + (th - 1.0) * np.log(b2)
    return np.exp(logh)


# ---------------------------------------------------------------------------
# BB families via their Archimedean generators, in log scale.
# For generator phi (decreasing, convex) with inverse psi:
#   C  = psi(phi(u1) + phi(u2))
#   h2 = phi'(u2) / phi'(C)
#   c  = -phi''(C) phi'(u1) phi'(u2) / phi'(C)^3


def _bb1_lphi(t, th, de):
    # phi(t) = (t^-th - 1)^de
    lw = np.log(np.expm1(-th * np.log(t)))
    return de * lw


def _bb1_lnegdphi(t, th, de):
    lw = np.log(np.expm1(-th * np.log(t)))
    return np.log(th * de) - (th + 1.0) * np.log(t) + (de - 1.0) * lw


def _bb1_lddphi(t, th, de):
    lt = np.log(t)
    lw = np.log(np.expm1(-th * lt))
    with np.errstate(divide="ignore"):
        # log(0) = -inf where delta == 1; logaddexp then drops the term
        second = np.log(th * np.maximum(de - 1.0, 0.0)) - th * lt
    inner = np.logaddexp(np.log(th + 1.0) + lw, second)
    return np.log(th * de) - (th + 2.0) * lt + (de - 2.0) * lw + inner


def _bb1_psi_from_log(ls, th, de):
    return np.exp(-np.log1p(np.exp(ls / de)) / th)


def _bb6_lw(t, th):
    # w(t) = -log(1 - (1-t)^th), stable at both ends
    b = 1.0 - t
    x = np.exp(th * np.log(b))
    return np.log(-np.log1p(-x))


def _bb6_lphi(t, th, de):
    return de * _bb6_lw(t, th)


def _bb6_lnegdphi(t, th, de):
    b = 1.0 - t
    x = np.exp(th * np.log(b))
    lw = np.log(-np.log1p(-x))
    return np.log(de * th) + (de - 1.0) * lw + (th - 1.0) * np.log(b) - np.log1p(-x)


def _bb6_lddphi(t, th, de):
    b = 1.0 - t
    x = np.exp(th * np.log(b))
    w = -np.log1p(-x)
    lw = np.log(w)
    inner = (de - 1.0) * th * x + (x + th - 1.0) * w
    return np.log(de * th) + (de - 2.0) * lw + (th - 2.0) * np.log(b) + np.log(inner) - 2.0 * np.log1p(-x)


def _bb6_psi_from_log(ls, th, de):
    sd = np.exp(ls / de)
    return 1.0 - np.exp(np.log(-np.expm1(-sd)) / th)


def _bb8_eta(th, de):
    return -np.expm1(th * np.log1p(-de))


def _bb8_phi(t, th, de):
    x = np.exp(th * np.log1p(-de * t))
    return np.log(_bb8_eta(th, de)) - np.log1p(-x)


def _bb8_lnegdphi(t, th, de):
    lk = np.log1p(-de * t)
    x = np.exp(th * lk)
    return np.log(de * th) + (th - 1.0) * lk - np.log1p(-x)


def _bb8_lddphi(t, th, de):
    lk = np.log1p(-de * t)
    x = np.exp(th * lk)
    return 2.0 * np.log(de) + np.log(th) + (th - 2.0) * lk + np.log(th - 1.0 + x) - 2.0 * np.log1p(-x)


def _bb8_psi(s, th, de):
    inner = -np.expm1(np.log(_bb8_eta(th, de)) - s)
    return (1.0 - np.exp(np.log(inner) / th)) / de


def _make_bb_ops(which: str):
    if which == "bb1":
        def cdf(u1, u2, th, de):
            ls = np.logaddexp(_bb1_lphi(u1, th, de), _bb1_lphi(u2, th, de))
            return _bb1_psi_from_log(ls, th, de)

        def h_generic(ucond_other, u1, u2, th, de):
            C = cdf(u1, u2, th, de)
            return np.exp(_bb1_lnegdphi(ucond_other, th, de) - _bb1_lnegdphi(C, th, de))

        def pdf(u1, u2, th, de):
            C = np.clip(cdf(u1, u2, th, de), EPS, 1.0 - EPS)
            lc = (
                _bb1_lddphi(C, th, de)
                + _bb1_lnegdphi(u1, th, de)
                + _bb1_lnegdphi(u2, th, de)
                - 3.0 * _bb1_lnegdphi(C, th, de)
            )
            return np.exp(lc)

        return pdf, cdf, h_generic
    if which == "bb6":
        def cdf(u1, u2, th, de):
            ls = np.logaddexp(_bb6_lphi(u1, th, de), _bb6_lphi(u2, th, de))
            return _bb6_psi_from_log(ls, th, de)

        def h_generic(ucond_other, u1, u2, th, de):
            C = np.clip(cdf(u1, u2, th, de), EPS, 1.0 - EPS)
            return np.exp(_bb6_lnegdphi(ucond_other, th, de) - _bb6_lnegdphi(C, th, de))

        def pdf(u1, u2, th, de):
            C = np.clip(cdf(u1, u2, th, de), EPS, 1.0 - EPS)
            lc = (
                _bb6_lddphi(C, th, de)
                + _bb6_lnegdphi(u1, th, de)
                + _bb6_lnegdphi(u2, th, de)
                - 3.0 * _bb6_lnegdphi(C, th, de)
            )
            return np.exp(lc)

        return pdf, cdf, h_generic
    if which == "bb8":
        def cdf(u1, u2, th, de):
            s = _bb8_phi(u1, th, de) + _bb8_phi(u2, th, de)
            return _bb8_psi(s, th, de)

        def h_generic(ucond_other, u1, u2, th, de):
            C = np.clip(cdf(u1, u2, th, de), EPS, 1.0 - EPS)
            return np.exp(_bb8_lnegdphi(ucond_other, th, de) - _bb8_lnegdphi(C, th, de))

        def pdf(u1, u2, th, de):
            C = np.clip(cdf(u1, u2, th, de), EPS, 1.0 - EPS)
            lc = (
                _bb8_lddphi(C, th, de)
                + _bb8_lnegdphi(u1, th, de)
                + _bb8_lnegdphi(u2, th, de)
                - 3.0 * _bb8_lnegdphi(C, th, de)
            )
            return np.exp(lc)

        return pdf, cdf, h_generic
    raise ValueError(which)


_bb1_pdf, _bb1_cdf, _bb1_h = _make_bb_ops("bb1")
_bb6_pdf, _bb6_cdf, _bb6_h = _make_bb_ops("bb6")
_bb8_pdf, _bb8_cdf, _bb8_h = _make_bb_ops("bb8")


# ---------------------------------------------------------------------------
# AMH


def _amh_cdf(u1, u2, g):
    return u1 * u2 / (1.0 - g * (1.0 - u1) * (1.0 - u2))


def _amh_h2(u1, u2, g):
    d = 1.0 - g * (1.0 - u1) * (1.0 - u2)
    return u1 * (1.0 - g * (1.0 - u1)) / (d * d)


def _amh_pdf(u1, u2, g):
    d = 1.0 - g * (1.0 - u1) * (1.0 - u2)
    num = 1.0 + g * (u1 + u2 + u1 * u2 - 2.0) - g * g * (u1 + u2 - u1 * u2 - 1.0)
    return num / (d * d * d)


# ---------------------------------------------------------------------------
# Tawn (extreme-value representation through the Pickands function)


def _tawn_A(t, th, p1, p2):
    a = p1 * (1.0 - t)
    b = p2 * t
    S = np.exp(th * np.log(a)) + np.exp(th * np.log(b))
    Apick = (1.0 - p1) * (1.0 - t) + (1.0 - p2) * t + np.exp(np.log(S) / th)
    dS = p2 * np.exp((th - 1.0) * np.log(b)) - p1 * np.exp((th - 1.0) * np.log(a))
    A1 = (p1 - p2) + np.exp((1.0 / th - 1.0) * np.log(S)) * dS
    return Apick, A1, S, dS


def _tawn_core(u1, u2, th, p1, p2):
    lu = np.log(u1)
    lv = np.log(u2)
    s = lu + lv
    t = np.clip(lv / s, 1e-12, 1.0 - 1e-12)
    return lu, lv, s, t


def _tawn_cdf(u1, u2, th, p1, p2):
    _, _, s, t = _tawn_core(u1, u2, th, p1, p2)
    A, _, _, _ = _tawn_A(t, th, p1, p2)
    return np.exp(s * A)


def _tawn_h1(u1, u2, th, p1, p2):
    _, _, s, t = _tawn_core(u1, u2, th, p1, p2)
    A, A1, _, _ = _tawn_A(t, th, p1, p2)
    return np.exp(s * A) * (A - t * A1) / u1


def _tawn_h2(u1, u2, th, p1, p2):
    _, _, s, t = _tawn_core(u1, u2, th, p1, p2)
    A, A1, _, _ = _tawn_A(t, th, p1, p2)
    return np.exp(s * A) * (A + (1.0 - t) * A1) / u2


def _tawn_pdf(u1, u2, th, p1, p2):
    _, _, s, t = _tawn_core(u1, u2, th, p1, p2)
    A, A1, S, dS = _tawn_A(t, th, p1, p2)
    # t(1-t)*A'' assembled directly so the th < 2 edge powers stay finite
    d2 = (1.0 - th) * np.exp((1.0 / th - 2.0) * np.log(S)) * dS * dS * t * (1.0 - t)
    d2 = d2 + (th - 1.0) * np.exp((1.0 / th - 1.0) * np.log(S)) * (
        np.exp(th * np.log(p1) + (th - 1.0) * np.log1p(-t)) * t
        + np.exp(th * np.log(p2) + (th - 1.0) * np.log(t)) * (1.0 - t)
    )
    core = (A - t * A1) * (A + (1.0 - t) * A1) - d2 / s
    return np.exp(s * A) * core / (u1 * u2)


def _tawn_weights(family: Family, th, psi):
    """Map (theta, psi) to the Pickands weights.

    Type 1 places the asymmetry weight on the first argument, type 2 on the
    second; the other weight is one (the Gumbel limit in that argument).
    """
    one = np.ones_like(np.asarray(psi, dtype=float))
    if family is Family.TAWN1:
        return th, psi, one
    return th, one, psi


def _make_tawn_ops(which: Family):
    def pdf(u1, u2, th, ps):
        return _tawn_pdf(u1, u2, *_tawn_weights(which, th, ps))

    def cdf(u1, u2, th, ps):
        return _tawn_cdf(u1, u2, *_tawn_weights(which, th, ps))

    def h1(u1, u2, th, ps):
        return _tawn_h1(u1, u2, *_tawn_weights(which, th, ps))

    def h2(u1, u2, th, ps):
        return _tawn_h2(u1, u2, *_tawn_weights(which, th, ps))

    return pdf, cdf, h1, h2


_tawn1_pdf, _tawn1_cdf, _tawn1_h1, _tawn1_h2 = _make_tawn_ops(Family.TAWN1)
_tawn2_pdf, _tawn2_cdf, _tawn2_h1, _tawn2_h2 = _make_tawn_ops(Family.TAWN2)


# ---------------------------------------------------------------------------
# kernel table


@dataclass(frozen=True)
class _Kernel:
    pdf: Callable
    cdf: Callable
    h1: Callable
    h2: Callable
    hinv1: Callable | None = None
    hinv2: Callable | None = None
    tau: Callable | None = None  # closed form on base (unrotated) params


def _swap(fn):
    return lambda u1, u2, *p: fn(u2, u1, *p)


_KERNELS: dict[Family, _Kernel] = {
    Family.INDEPENDENCE: _Kernel(
        pdf=lambda u1, u2: np.ones(np.broadcast_shapes(np.shape(u1), np.shape(u2))),
        cdf=lambda u1, u2: np.asarray(u1) * np.asarray(u2),
        h1=lambda u1, u2: np.broadcast_arrays(np.asarray(u1), np.asarray(u2))[1].copy(),
        h2=lambda u1, u2: np.broadcast_arrays(np.asarray(u1), np.asarray(u2))[0].copy(),
        hinv1=lambda p, u1: np.broadcast_arrays(np.asarray(p), np.asarray(u1))[0].copy(),
        hinv2=lambda p, u2: np.broadcast_arrays(np.asarray(p), np.asarray(u2))[0].copy(),
        tau=lambda: 0.0,
    ),
    Family.GAUSSIAN: _Kernel(
        pdf=_ga_pdf,
        cdf=_ga_cdf,
        h1=_swap(_ga_h2),
        h2=_ga_h2,
        hinv1=_ga_hinv2,
        hinv2=_ga_hinv2,
        tau=lambda rho: 2.0 / math.pi * math.asin(rho),
    ),
    Family.STUDENT_T: _Kernel(
        pdf=_t_pdf,
        cdf=_t_cdf,
        h1=_swap(_t_h2),
        h2=_t_h2,
        hinv1=_t_hinv2,
        hinv2=_t_hinv2,
        tau=lambda rho, nu: 2.0 / math.pi * math.asin(rho),
    ),
    Family.CLAYTON: _Kernel(
        pdf=_cl_pdf,
        cdf=_cl_cdf,
        h1=_swap(_cl_h2),
        h2=_cl_h2,
        hinv1=_cl_hinv2,
        hinv2=_cl_hinv2,
        tau=lambda th: th / (th + 2.0),
    ),
    Family.GUMBEL: _Kernel(
        pdf=_gu_pdf,
        cdf=_gu_cdf,
        h1=_swap(_gu_h2),
        h2=_gu_h2,
        tau=lambda th: 1.0 - 1.0 / th,
    ),
    Family.FRANK: _Kernel(
        pdf=_fr_pdf,
        cdf=_fr_cdf,
        h1=_swap(_fr_h2),
        h2=_fr_h2,
        hinv1=_fr_hinv2,
        hinv2=_fr_hinv2,
        tau=lambda th: math.copysign(
            1.0 - 4.0 / abs(th) * (1.0 - debye1(abs(th))), th
        ),
    ),
    Family.JOE: _Kernel(
        pdf=_jo_pdf,
        cdf=_jo_cdf,
        h1=_swap(_jo_h2),
        h2=_jo_h2,
    ),
    Family.BB1: _Kernel(
        pdf=_bb1_pdf,
        cdf=_bb1_cdf,
        h1=lambda u1, u2, th, de: _bb1_h(u1, u1, u2, th, de),
        h2=lambda u1, u2, th, de: _bb1_h(u2, u1, u2, th, de),
    ),
    Family.BB6: _Kernel(
        pdf=_bb6_pdf,
        cdf=_bb6_cdf,
        h1=lambda u1, u2, th, de: _bb6_h(u1, u1, u2, th, de),
        h2=lambda u1, u2, th, de: _bb6_h(u2, u1, u2, th, de),
    ),
    Family.BB8: _Kernel(
        pdf=_bb8_pdf,
        cdf=_bb8_cdf,
        h1=lambda u1, u2, th, de: _bb8_h(u1, u1, u2, th, de),
        h2=lambda u1, u2, th, de: _bb8_h(u2, u1, u2, th, de),
    ),
    Family.TAWN1: _Kernel(pdf=_tawn1_pdf, cdf=_tawn1_cdf, h1=_tawn1_h1, h2=_tawn1_h2),
    Family.TAWN2: _Kernel(pdf=_tawn2_pdf, cdf=_tawn2_cdf, h1=_tawn2_h1, h2=_tawn2_h2),
    Family.AMH: _Kernel(
        pdf=_amh_pdf,
        cdf=_amh_cdf,
        h1=_swap(_amh_h2),
        h2=_amh_h2,
    ),
}


# ---------------------------------------------------------------------------
# rotation-aware dispatch on arrays


def _base_pdf(family: Family, u1, u2, params):
    if family is Family.INDEPENDENCE:
        return _KERNELS[family].pdf(u1, u2)
    return _KERNELS[family].pdf(u1, u2, *params)


def _base_cdf_interior(family: Family, u1, u2, params):
    if family is Family.INDEPENDENCE:
        return _KERNELS[family].cdf(u1, u2)
    return _KERNELS[family].cdf(u1, u2, *params)


def _base_cdf(family: Family, u1, u2, params):
    """Base-family CDF, exact on the boundary of the unit square."""
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    val = _base_cdf_interior(family, _clamp_interior(u1), _clamp_interior(u2), params)
    val = np.where(u1 <= 0.0, 0.0, val)
    val = np.where(u2 <= 0.0, 0.0, val)
    val = np.where(u1 >= 1.0, np.minimum(u2, 1.0), val)
    val = np.where(u2 >= 1.0, np.where(u1 >= 1.0, 1.0, u1), val)
    return val


def _base_h1(family: Family, u1, u2, params):
    u2a = np.asarray(u2, dtype=float)
    val = _KERNELS[family].h1(_clamp_interior(np.asarray(u1, dtype=float)), _clamp_interior(u2a), *params) \
        if family is not Family.INDEPENDENCE else _KERNELS[family].h1(u1, u2a)
    val = np.where(u2a <= 0.0, 0.0, val)
    val = np.where(u2a >= 1.0, 1.0, val)
    return np.clip(val, 0.0, 1.0)


def _base_h2(family: Family, u1, u2, params):
    u1a = np.asarray(u1, dtype=float)
    val = _KERNELS[family].h2(_clamp_interior(u1a), _clamp_interior(np.asarray(u2, dtype=float)), *params) \
        if family is not Family.INDEPENDENCE else _KERNELS[family].h2(u1a, u2)
    val = np.where(u1a <= 0.0, 0.0, val)
    val = np.where(u1a >= 1.0, 1.0, val)
    return np.clip(val, 0.0, 1.0)


def _polish_root(f_value, f_deriv, x, target):
    # Guarded Newton polish after bisection: a step is kept only where it
    # shrinks the residual, so flat or spiky density regions cannot push the
    # iterate away from the bracketed root.
    resid = np.abs(f_value(x) - target)
    for _ in range(2):
        with np.errstate(divide="ignore", invalid="ignore"):
            step = (f_value(x) - target) / f_deriv(x)
        step = np.where(np.isfinite(step), step, 0.0)
        cand = np.clip(x - step, EPS, 1.0 - EPS)
        cand_resid = np.abs(f_value(cand) - target)
        better = cand_resid < resid
        x = np.where(better, cand, x)
        resid = np.where(better, cand_resid, resid)
    return x


def _base_hinv2(family: Family, p, u2, params):
    p = np.clip(np.asarray(p, dtype=float), P_LO, P_HI)
    u2 = _clamp_interior(np.asarray(u2, dtype=float))
    kern = _KERNELS[family]
    if kern.hinv2 is not None:
        if family is Family.INDEPENDENCE:
            return kern.hinv2(p, u2)
        return np.clip(kern.hinv2(p, u2, *params), EPS, 1.0 - EPS)
    root = _bisect_monotone(lambda x: _base_h2(family, x, u2, params), p)
    return _polish_root(
        lambda x: _base_h2(family, x, u2, params),
        lambda x: _base_pdf(family, x, u2, params),
        root,
        p,
    )


def _base_hinv1(family: Family, p, u1, params):
    p = np.clip(np.asarray(p, dtype=float), P_LO, P_HI)
    u1 = _clamp_interior(np.asarray(u1, dtype=float))
    kern = _KERNELS[family]
    if kern.hinv1 is not None:
        if family is Family.INDEPENDENCE:
            return kern.hinv1(p, u1)
        return np.clip(kern.hinv1(p, u1, *params), EPS, 1.0 - EPS)
    root = _bisect_monotone(lambda x: _base_h1(family, u1, x, params), p)
    return _polish_root(
        lambda x: _base_h1(family, u1, x, params),
        lambda x: _base_pdf(family, u1, x, params),
        root,
        p,
    )


def family_pdf(family: Family, rotation: int, params, u1, u2):
    u1 = _clamp_interior(_check_unit(u1, "u1", closed=True))
    u2 = _clamp_interior(_check_unit(u2, "u2", closed=True))
    if rotation == 0:
        return _base_pdf(family, u1, u2, params)
    if rotation == 90:
        return _base_pdf(family, 1.0 - u2, u1, params)
    if rotation == 180:
        return _base_pdf(family, 1.0 - u1, 1.0 - u2, params)
    return _base_pdf(family, u2, 1.0 - u1, params)


def family_cdf(family: Family, rotation: int, params, u1, u2):
    u1 = _check_unit(u1, "u1", closed=True)
    u2 = _check_unit(u2, "u2", closed=True)
    if rotation == 0:
        return _base_cdf(family, u1, u2, params)
    if rotation == 90:
        return u1 - _base_cdf(family, 1.0 - u2, u1, params)
    if rotation == 180:
        return u1 + u2 - 1.0 + _base_cdf(family, 1.0 - u1, 1.0 - u2, params)
    return u2 - _base_cdf(family, u2, 1.0 - u1, params)


def family_h2(family: Family, rotation: int, params, u1, u2):
    u1 = _check_unit(u1, "u1", closed=True)
    u2 = _check_unit(u2, "u2", closed=True)
    if rotation == 0:
        return _base_h2(family, u1, u2, params)
    if rotation == 90:
        return _base_h1(family, 1.0 - u2, u1, params)
    if rotation == 180:
        return 1.0 - _base_h2(family, 1.0 - u1, 1.0 - u2, params)
    return 1.0 - _base_h1(family, u2, 1.0 - u1, params)


def family_h1(family: Family, rotation: int, params, u1, u2):
    u1 = _check_unit(u1, "u1", closed=True)
    u2 = _check_unit(u2, "u2", closed=True)
    if rotation == 0:
        return _base_h1(family, u1, u2, params)
    if rotation == 90:
        return 1.0 - _base_h2(family, 1.0 - u2, u1, params)
    if rotation == 180:
        return 1.0 - _base_h1(family, 1.0 - u1, 1.0 - u2, params)
    return _base_h2(family, u2, 1.0 - u1, params)


def family_hinv2(family: Family, rotation: int, params, p, u2):
    p = _check_unit(p, "p", closed=True)
    u2 = _check_unit(u2, "u2", closed=True)
    if rotation == 0:
        return _base_hinv2(family, p, u2, params)
    if rotation == 90:
        return _base_hinv1(family, p, 1.0 - u2, params)
    if rotation == 180:
        return 1.0 - _base_hinv2(family, 1.0 - p, 1.0 - u2, params)
    return 1.0 - _base_hinv1(family, 1.0 - p, u2, params)


def family_hinv1(family: Family, rotation: int, params, p, u1):
    p = _check_unit(p, "p", closed=True)
    u1 = _check_unit(u1, "u1", closed=True)
    if rotation == 0:
        return _base_hinv1(family, p, u1, params)
    if rotation == 90:
        return 1.0 - _base_hinv2(family, 1.0 - p, u1, params)
    if rotation == 180:
        return 1.0 - _base_hinv1(family, 1.0 - p, 1.0 - u1, params)
    return _base_hinv2(family, p, 1.0 - u1, params)


# ---------------------------------------------------------------------------
# Kendall's tau


def _tau_numeric(family: Family, params, n: int = 40) -> float:
    # 2-D tensor Gauss-Legendre of tau = 4 * E[C(U,V)] - 1 on endpoint-
    # clustered nodes; the clustering keeps tail-dependent integrands resolved.
    u, w = gauss_legendre_unit_clustered(n)
    U = u[:, None]
    V = u[None, :]
    W = w[:, None] * w[None, :]
    with np.errstate(all="ignore"):
        val = 4.0 * np.sum(
            W * _base_cdf_interior(family, U, V, params) * _base_pdf(family, U, V, params)
        ) - 1.0
    return float(val)


def family_tau(family: Family, rotation: int, params) -> float:
    kern = _KERNELS[family]
    if kern.tau is not None:
        base = kern.tau(*params) if family is not Family.INDEPENDENCE else 0.0
    else:
        base = _tau_numeric(family, params)
    if rotation in (90, 270):
        return -base
    return base


_TAU_ATTAINABLE: dict[Family, tuple[float, float]] = {
    Family.GAUSSIAN: (-1.0, 1.0),
    Family.CLAYTON: (0.0, 1.0),
    Family.GUMBEL: (0.0, 1.0),
    Family.FRANK: (-1.0, 1.0),
    Family.JOE: (0.0, 1.0),
    Family.AMH: (0.0, 1.0 / 3.0),
}

_SINGLE_PARAM_TAU_BOUNDS = {
    Family.FRANK: (1e-6, 100.0),
    Family.JOE: (1.0 + 1e-6, 50.0),
    Family.AMH: (0.0, 1.0 - 1e-9),
}


def params_from_tau(family: Family, tau: float) -> tuple[float, ...]:
    """Invert the tau map for single-parameter families.

    Two-parameter families have no unique inverse and raise ``Unsupported``;
    a tau outside the family's attainable range raises ``OutOfRange``.
    """
    if family is Family.INDEPENDENCE:
        if abs(tau) > 1e-12:
            raise OutOfRange("independence only attains tau = 0")
        return ()
    if family not in _TAU_ATTAINABLE:
        raise Unsupported(f"params_from_tau not defined for {family.value}")
    lo, hi = _TAU_ATTAINABLE[family]
    if not (lo < tau < hi) and not (family is Family.GUMBEL and tau == 0.0) and not (
        family is Family.AMH and tau == 0.0
    ):
        raise OutOfRange(f"{family.value} cannot attain tau = {tau}")
    if family is Family.GAUSSIAN:
        return (math.sin(math.pi * tau / 2.0),)
    if family is Family.CLAYTON:
        return (2.0 * tau / (1.0 - tau),)
    if family is Family.GUMBEL:
        return (1.0 / (1.0 - tau),)
    # Frank, Joe, AMH: bisect the same tau map used by family_tau so the
    # round trip agrees to the solver tolerance.
    sign = 1.0
    target = tau
    if family is Family.FRANK and tau < 0:
        sign, target = -1.0, -tau
    b_lo, b_hi = _SINGLE_PARAM_TAU_BOUNDS[family]

    def tau_of(theta: float) -> float:
        return family_tau(family, 0, (theta,))

    if target >= tau_of(b_hi):
        raise OutOfRange(f"{family.value} cannot attain tau = {tau}")
    lo_x, hi_x = b_lo, b_hi
    for _ in range(200):
        mid = 0.5 * (lo_x + hi_x)
        if tau_of(mid) < target:
            lo_x = mid
        else:
            hi_x = mid
        if hi_x - lo_x < 1e-11 * max(1.0, hi_x):
            break
    return (sign * 0.5 * (lo_x + hi_x),)


# ---------------------------------------------------------------------------
# public value type


@dataclass(frozen=True)
class BivariateCopula:
    """A rotated parametric bivariate copula.

    Immutable after construction; every method is a pure function, safe for
    concurrent use. Negative-first-parameter shorthand is resolved by
    :func:`canonicalize` (used automatically by :meth:`from_json`).
    """

    family: Family
    rotation: int = 0
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.rotation not in ROTATIONS:
            raise InvalidParams(f"rotation must be one of {ROTATIONS}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        validate_params(self.family, self.params)

    # -- evaluation --------------------------------------------------------
    def pdf(self, u1, u2):
        return family_pdf(self.family, self.rotation, self.params, u1, u2)

    def cdf(self, u1, u2):
        return family_cdf(self.family, self.rotation, self.params, u1, u2)

    def hfunc1(self, u1, u2):
        return family_h1(self.family, self.rotation, self.params, u1, u2)

    def hfunc2(self, u1, u2):
        return family_h2(self.family, self.rotation, self.params, u1, u2)

    def hinv1(self, p, u1):
        return family_hinv1(self.family, self.rotation, self.params, p, u1)

    def hinv2(self, p, u2):
        return family_hinv2(self.family, self.rotation, self.params, p, u2)

    def tau(self) -> float:
        return family_tau(self.family, self.rotation, self.params)

    def simulate(self, n: int, seed: int = 0) -> np.ndarray:
        """n pairs via conditional inversion with the Philox counter generator."""
        rng = np.random.Generator(np.random.Philox(seed))
        w = rng.random((int(n), 2))
        u2 = np.clip(w[:, 1], EPS, 1.0 - EPS)
        u1 = self.hinv2(w[:, 0], u2)
        return np.column_stack([u1, u2])

    @property
    def n_params(self) -> int:
        return len(PARAM_SPACE[self.family])

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "family": self.family.value,
            "rotation": self.rotation,
            "params": list(self.params),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BivariateCopula":
        try:
            family = Family(obj["family"])
        except (KeyError, ValueError) as exc:
            raise InvalidParams(f"unknown copula family in {obj!r}") from exc
        fam, rot, par = canonicalize(
            family, int(obj.get("rotation", 0)), tuple(obj.get("params", ()))
        )
        return cls(fam, rot, par)


INDEPENDENCE = BivariateCopula(Family.INDEPENDENCE)


def family_metadata() -> list[dict]:
    """Parameter-space description for every family (service /families)."""
    out = []
    for fam, space in PARAM_SPACE.items():
        out.append(
            {
                "family": fam.value,
                "n_params": len(space),
                "params": [
                    {
                        "name": name,
                        "min": None if not math.isfinite(lo) else lo,
                        "max": None if not math.isfinite(hi) else hi,
                        "min_inclusive": lo_inc,
                        "max_inclusive": hi_inc,
                    }
                    for (name, lo, hi, lo_inc, hi_inc) in space
                ],
                "rotations": list(ROTATIONS),
                "tau_invertible": fam in _TAU_ATTAINABLE or fam is Family.INDEPENDENCE,
            }
        )
    return out
