"""Likelihood-based fitting.

Single-pair maximum likelihood with AIC family selection, the sampling-based
simplified approximation of a non-simplified vine, full simplified-vine
fitting with structure choice, and a binned local-likelihood estimator for
the conditional parameter curve.

Candidate-family fits, per-bin fits and bootstrap replicates are independent
pure computations and safe to run in parallel; results are reduced in a
fixed order (candidate list order, bin order, replicate order), so the
output is stable for a given seed regardless of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.stats import kendalltau

from .errors import AllFitsFailed, BinTooSmall, DomainError, OutOfRange, Unsupported
from .families import (
    EPS,
    BivariateCopula,
    Family,
    family_pdf,
    params_from_tau,
)
from .vine import ConditionalPair, Margins, ParamForm, ParamFunction, SampleMatrix, VineSpec3D

_FAMILY_ORDER = {fam: i for i, fam in enumerate(Family)}

INDEPENDENCE_COPULA = BivariateCopula(Family.INDEPENDENCE)

# Box constraints used by the optimizer (narrower than the parameter spaces
# where the likelihood surface needs it; nu capped to (2, 30]).
_FIT_BOUNDS: dict[Family, tuple[tuple[float, float], ...]] = {
    Family.GAUSSIAN: ((-0.9999, 0.9999),),
    Family.STUDENT_T: ((-0.9999, 0.9999), (2.0 + 1e-6, 30.0)),
    Family.CLAYTON: ((1e-4, 28.0),),
    Family.GUMBEL: ((1.0, 17.0),),
    Family.FRANK: ((-35.0, 35.0),),
    Family.JOE: ((1.0 + 1e-6, 30.0),),
    Family.BB1: ((1e-3, 7.0), (1.0, 7.0)),
    Family.BB6: ((1.0, 6.0), (1.0, 8.0)),
    Family.BB8: ((1.0, 8.0), (1e-4, 1.0)),
    Family.TAWN1: ((1.0 + 1e-6, 18.0), (1e-4, 1.0 - 1e-4)),
    Family.TAWN2: ((1.0 + 1e-6, 18.0), (1e-4, 1.0 - 1e-4)),
    Family.AMH: ((0.0, 1.0 - 1e-6),),
}

# Families that span negative and positive dependence natively; they are only
# ever fitted unrotated. One-sided families enter with the rotations matching
# the sign of the empirical tau.
_SIGN_FLEXIBLE = (Family.GAUSSIAN, Family.STUDENT_T, Family.FRANK)
_ONE_SIDED = (
    Family.CLAYTON,
    Family.GUMBEL,
    Family.JOE,
    Family.BB1,
    Family.BB6,
    Family.BB8,
    Family.TAWN1,
    Family.TAWN2,
    Family.AMH,
)


@dataclass(frozen=True)
class FitResult:
    copula: BivariateCopula
    loglik: float
    aic: float
    n: int

    def to_json(self) -> dict:
        return {
            "copula": self.copula.to_json(),
            "loglik": self.loglik,
            "aic": self.aic,
            "n": self.n,
        }


@dataclass(frozen=True)
class TauCurveEstimate:
    grid: np.ndarray
    tau_hat: np.ndarray
    ci_lo: np.ndarray
    ci_hi: np.ndarray
    family: Family

    def __post_init__(self):
        for name in ("grid", "tau_hat", "ci_lo", "ci_hi"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if np.any(np.diff(self.grid) <= 0):
            raise DomainError("tau-curve knots must be strictly increasing")
        if np.any(self.ci_lo > self.tau_hat) or np.any(self.ci_hi < self.tau_hat):
            raise DomainError("confidence band must cover the point estimate")

    def to_json(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "tau_hat": self.tau_hat.tolist(),
            "ci_lo": self.ci_lo.tolist(),
            "ci_hi": self.ci_hi.tolist(),
            "family": self.family.value,
        }


def default_candidates(tau_hat: float) -> list[tuple[Family, int]]:
    """All families crossed with the rotations compatible with the tau sign."""
    cands: list[tuple[Family, int]] = [(Family.INDEPENDENCE, 0)]
    cands.extend((fam, 0) for fam in _SIGN_FLEXIBLE)
    rots = (0, 180) if tau_hat >= 0 else (90, 270)
    for fam in _ONE_SIDED:
        cands.extend((fam, r) for r in rots)
    return cands


def _loglik(family: Family, rotation: int, params, u: np.ndarray) -> float:
    try:
        with np.errstate(all="ignore"):
            dens = family_pdf(family, rotation, params, u[:, 0], u[:, 1])
            ll = float(np.sum(np.log(dens)))
    except FloatingPointError:
        return -np.inf
    return ll if np.isfinite(ll) else -np.inf


def _tau_start(family: Family, tau_hat: float) -> float:
    # winsorized |tau| kept inside the family's attainable range
    t = min(abs(tau_hat), 0.9)
    t = max(t, 0.02)
    if family is Family.AMH:
        t = min(t, 0.31)
    return t


def _start_params(family: Family, tau_hat: float) -> tuple[float, ...]:
    """Fixed, documented optimizer starts (tau-inversion where defined)."""
    t = _tau_start(family, tau_hat)
    if family in (Family.GAUSSIAN, Family.CLAYTON, Family.GUMBEL, Family.FRANK,
                  Family.JOE, Family.AMH):
        try:
            return params_from_tau(family, t)
        except (OutOfRange, Unsupported):
            pass
    if family is Family.STUDENT_T:
        return (math.sin(math.pi * np.clip(tau_hat, -0.97, 0.97) / 2.0), 4.0)
    if family is Family.BB1:
        theta = max(2.0 / (1.5 * (1.0 - t)) - 2.0, 0.05)
        return (theta, 1.5)
    if family is Family.BB6:
        return (1.2, 1.0 / (1.0 - t))
    if family is Family.BB8:
        return (1.0 / (1.0 - t) + 0.5, 0.9)
    if family in (Family.TAWN1, Family.TAWN2):
        return (max(1.5, 1.0 / (1.0 - min(t / 0.7, 0.9))), 0.7)
    return tuple(0.5 * (lo + hi) for lo, hi in _FIT_BOUNDS[family])


def _clip_to_bounds(params, bounds):
    return tuple(
        float(np.clip(p, lo + 1e-12, hi - 1e-12 if hi < math.inf else hi))
        for p, (lo, hi) in zip(params, bounds)
    )


def _fit_student_t(rotation: int, u: np.ndarray, tau_hat: float) -> tuple[tuple[float, ...], float]:
    """Exact t-copula MLE by profiling: the quantile transform depends only on
    the degrees of freedom, so the correlation is maximized with cached
    transforms inside a 1-D outer search over nu."""
    from scipy.special import gammaln as _gl

    if rotation == 0:
        a, b = u[:, 0], u[:, 1]
    elif rotation == 90:
        a, b = 1.0 - u[:, 1], u[:, 0]
    elif rotation == 180:
        a, b = 1.0 - u[:, 0], 1.0 - u[:, 1]
    else:
        a, b = u[:, 1], 1.0 - u[:, 0]
    n = a.size
    (rho_lo, rho_hi), (nu_lo, nu_hi) = _FIT_BOUNDS[Family.STUDENT_T]
    rho0 = float(np.clip(math.sin(math.pi * tau_hat / 2.0), rho_lo, rho_hi))

    from scipy.special import stdtrit

    def profile(nu: float) -> tuple[float, float]:
        x = stdtrit(nu, a)
        y = stdtrit(nu, b)
        base = n * (
            _gl((nu + 2.0) / 2.0) + _gl(nu / 2.0) - 2.0 * _gl((nu + 1.0) / 2.0)
        ) + 0.5 * (nu + 1.0) * float(np.sum(np.log1p(x * x / nu) + np.log1p(y * y / nu)))
        xx, xy, yy = x * x, x * y, y * y

        def ll(rho: float) -> float:
            om = 1.0 - rho * rho
            q = (xx - 2.0 * rho * xy + yy) / (nu * om)
            return base - 0.5 * n * math.log(om) - 0.5 * (nu + 2.0) * float(
                np.sum(np.log1p(q))
            )

        res = optimize.minimize_scalar(
            lambda r: -ll(r), bounds=(rho_lo, rho_hi), method="bounded",
            options={"xatol": 1e-7, "maxiter": 200},
        )
        best_rho, best_ll = float(res.x), -float(res.fun)
        if ll(rho0) > best_ll:
            best_rho, best_ll = rho0, ll(rho0)
        return best_rho, best_ll

    outer = optimize.minimize_scalar(
        lambda nu: -profile(nu)[1], bounds=(nu_lo, nu_hi), method="bounded",
        options={"xatol": 1e-4, "maxiter": 80},
    )
    nu_hat = float(outer.x)
    rho_hat, ll_hat = profile(nu_hat)
    return (rho_hat, nu_hat), ll_hat


def _fit_one(
    family: Family, rotation: int, u: np.ndarray, tau_hat: float
) -> tuple[tuple[float, ...], float] | None:
    """Maximize the sample log-likelihood for one candidate; None on failure."""
    if family is Family.INDEPENDENCE:
        return (), 0.0
    if family is Family.STUDENT_T:
        params, ll = _fit_student_t(rotation, u, tau_hat)
        return (params, ll) if np.isfinite(ll) else None
    bounds = _FIT_BOUNDS[family]
    start = _clip_to_bounds(_start_params(family, tau_hat), bounds)
    ll_start = _loglik(family, rotation, start, u)

    if len(bounds) == 1:
        lo, hi = bounds[0]
        res = optimize.minimize_scalar(
            lambda x: -_loglik(family, rotation, (x,), u),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-7, "maxiter": 500},
        )
        best_p, best_ll = (float(res.x),), -float(res.fun)
        # the bounded search must never fall below its tau-inversion start
        if np.isfinite(ll_start) and ll_start > best_ll:
            best_p, best_ll = start, ll_start
        return (best_p, best_ll) if np.isfinite(best_ll) else None

    # two parameters: Nelder-Mead on a logit box transform
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])

    def to_z(x):
        frac = np.clip((np.asarray(x) - lo) / (hi - lo), 1e-9, 1 - 1e-9)
        return np.log(frac / (1 - frac))

    def to_x(z):
        return lo + (hi - lo) / (1.0 + np.exp(-np.asarray(z)))

    def nll(z):
        val = -_loglik(family, rotation, tuple(to_x(z)), u)
        # a finite penalty keeps the simplex arithmetic clean at bad corners
        return val if np.isfinite(val) else 1e12

    z0 = to_z(start)
    f0 = nll(z0)
    simplex = np.array([z0, z0 + np.array([0.15, 0.0]), z0 + np.array([0.0, 0.15])])
    res = optimize.minimize(
        nll,
        z0,
        method="Nelder-Mead",
        options={
            "maxiter": 500,
            "fatol": 1e-8 * max(1.0, abs(f0)),
            "xatol": 1e-6,
            "initial_simplex": simplex,
        },
    )
    best_p = _clip_to_bounds(tuple(to_x(res.x)), bounds)
    best_ll = -float(res.fun)
    if np.isfinite(ll_start) and ll_start > best_ll:
        best_p, best_ll = start, ll_start
    return (best_p, best_ll) if np.isfinite(best_ll) else None


def fit_bicop(
    data: np.ndarray,
    families: list[tuple[Family, int]] | None = None,
    indep_test: float | None = None,
) -> FitResult:
    """AIC-minimal maximum-likelihood fit over the candidate set.

    Ties break toward higher log-likelihood, then family declaration order.
    ``indep_test`` enables the rank-correlation independence pre-test at the
    given significance level: when independence is not rejected, it is
    returned outright instead of letting one of many candidates win on AIC
    noise. The default leaves the pre-test off, so tail-dependent but
    rank-uncorrelated data can still select a dependent family.
    """
    u = np.asarray(data, dtype=float)
    if u.ndim != 2 or u.shape[1] != 2:
        raise DomainError("fit_bicop expects an N x 2 array")
    if u.shape[0] < 20:
        raise DomainError("fit_bicop needs at least 20 observations")
    u = np.clip(u, EPS, 1.0 - EPS)
    kt = kendalltau(u[:, 0], u[:, 1])
    tau_hat = float(kt.statistic)
    if not np.isfinite(tau_hat):
        tau_hat = 0.0
    if indep_test is not None and kt.pvalue >= indep_test:
        return FitResult(copula=INDEPENDENCE_COPULA, loglik=0.0, aic=0.0, n=u.shape[0])
    cands = default_candidates(tau_hat) if families is None else list(families)

    results = []
    for fam, rot in cands:
        try:
            fitted = _fit_one(fam, rot, u, tau_hat)
        except Exception:
            fitted = None
        if fitted is None:
            continue
        params, ll = fitted
        k = len(params)
        aic = -2.0 * ll + 2.0 * k
        results.append((aic, -ll, _FAMILY_ORDER[fam], rot, fam, params))
    if not results:
        raise AllFitsFailed("no candidate family produced a converged fit")
    results.sort(key=lambda r: r[:4])
    aic, negll, _, rot, fam, params = results[0]
    return FitResult(
        copula=BivariateCopula(fam, rot, params),
        loglik=-negll,
        aic=aic,
        n=u.shape[0],
    )


def simplified_approx(
    spec: VineSpec3D,
    n: int = 100_000,
    seed: int = 0,
    families: list[tuple[Family, int]] | None = None,
) -> VineSpec3D:
    """Simplified approximation by likelihood fit on conditional pseudo-observations.

    Keeps both unconditional pairs and replaces the conditional pair by the
    likelihood-maximizing constant copula fitted to a size-n sample; this
    estimates the Kullback-Leibler-closest constant conditional copula.
    """
    sample = spec.simulate(n, seed)
    po = spec.pseudo_obs(sample)
    fit = fit_bicop(po, families)
    return VineSpec3D(
        c12=spec.c12,
        c23=spec.c23,
        c13_2=ConditionalPair.constant(fit.copula),
        margins=spec.margins,
        order=spec.order,
    )


def select_structure(data: np.ndarray) -> int:
    """1-based index of the conditioning variable.

    Picks the variable maximizing the summed absolute empirical Kendall's tau
    with the other two (the variable sitting on both unconditional edges);
    ties break toward the smallest index.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim != 2 or x.shape[1] != 3:
        raise DomainError("select_structure expects an N x 3 array")
    if x.shape[0] < 20:
        raise DomainError("select_structure needs at least 20 observations")
    t12 = abs(kendalltau(x[:, 0], x[:, 1]).statistic)
    t13 = abs(kendalltau(x[:, 0], x[:, 2]).statistic)
    t23 = abs(kendalltau(x[:, 1], x[:, 2]).statistic)
    sums = np.array([t12 + t13, t12 + t23, t13 + t23])
    return int(np.argmax(sums)) + 1


_ORDER_FOR_CENTER = {1: (2, 1, 3), 2: (1, 2, 3), 3: (1, 3, 2)}


def _fit_tree1(data: np.ndarray, families, indep_test=None):
    """Structure choice plus both unconditional fits; returns the relabeled pieces."""
    x = np.clip(np.asarray(data, dtype=float), EPS, 1.0 - EPS)
    center = select_structure(x)
    order = _ORDER_FOR_CENTER[center]
    cols = [x[:, j - 1] for j in order]
    u1, u2, u3 = cols
    fit12 = fit_bicop(np.column_stack([u1, u2]), families, indep_test)
    fit23 = fit_bicop(np.column_stack([u2, u3]), families, indep_test)
    v = fit12.copula.hfunc2(u1, u2)
    w = fit23.copula.hfunc1(u2, u3)
    return order, fit12, fit23, u2, v, w


def fit_simplified_vine(
    data: np.ndarray,
    families: list[tuple[Family, int]] | None = None,
    indep_test: float | None = None,
) -> VineSpec3D:
    """Structure selection, unconditional fits, then the constant conditional fit."""
    x = np.asarray(data, dtype=float)
    if x.shape[0] < 50:
        raise DomainError("fit_simplified_vine needs at least 50 observations")
    order, fit12, fit23, _, v, w = _fit_tree1(x, families, indep_test)
    fit_cond = fit_bicop(np.column_stack([v, w]), families, indep_test)
    return VineSpec3D(
        c12=fit12.copula,
        c23=fit23.copula,
        c13_2=ConditionalPair.constant(fit_cond.copula),
        margins=Margins.STD_NORMAL,
        order=order,
    )


# Interpolation scale per parameter for the binned curve: correlation-type
# parameters interpolate on the Fisher-z scale, positive shape parameters on
# the log scale, everything else linearly.
_PWL_SCALES: dict[Family, tuple[str, ...]] = {
    Family.GAUSSIAN: ("fisher_z",),
    Family.STUDENT_T: ("fisher_z", "log"),
    Family.CLAYTON: ("log",),
    Family.GUMBEL: ("log",),
    Family.FRANK: ("identity",),
    Family.JOE: ("log",),
    Family.BB1: ("log", "log"),
    Family.BB6: ("log", "log"),
    Family.BB8: ("log", "identity"),
    Family.TAWN1: ("log", "identity"),
    Family.TAWN2: ("log", "identity"),
    Family.AMH: ("identity",),
}


def _binned_candidates(fam: Family, tau_bin: float) -> list[tuple[Family, int]]:
    if fam in _SIGN_FLEXIBLE or fam is Family.INDEPENDENCE:
        return [(fam, 0)]
    return [(fam, 0 if tau_bin >= 0 else 90)]


def _fit_bins(vw_u2: np.ndarray, edges: np.ndarray, fam: Family):
    """Per-bin fits of one family; returns knots, signed params, taus."""
    u2 = vw_u2[:, 2]
    knots, signed_params, taus, lls, n_par = [], [], [], [], 0
    for b in range(len(edges) - 1):
        lo, hi = edges[b], edges[b + 1]
        mask = (u2 >= lo) & (u2 < hi) if b < len(edges) - 2 else (u2 >= lo) & (u2 <= hi)
        sub = vw_u2[mask]
        if sub.shape[0] < 20:
            raise BinTooSmall(f"bin {b} holds {sub.shape[0]} rows")
        tau_bin = kendalltau(sub[:, 0], sub[:, 1]).statistic
        tau_bin = 0.0 if not np.isfinite(tau_bin) else float(tau_bin)
        fit = fit_bicop(sub[:, :2], families=_binned_candidates(fam, tau_bin))
        cop = fit.copula
        sign = -1.0 if cop.rotation in (90, 270) else 1.0
        params = list(cop.params)
        if params:
            params[0] = sign * params[0]
        knots.append(float(np.mean(sub[:, 2])))
        signed_params.append(params)
        taus.append(cop.tau())
        lls.append(fit.loglik)
        n_par = max(n_par, len(params))
    return np.array(knots), signed_params, np.array(taus), float(np.sum(lls)), n_par


def _pwl_functions(fam: Family, knots: np.ndarray, signed_params) -> tuple[ParamFunction, ...]:
    if fam is Family.INDEPENDENCE:
        return ()
    fns = []
    for j, scale in enumerate(_PWL_SCALES[fam]):
        vals = np.array([p[j] for p in signed_params], dtype=float)
        if scale == "log" and np.any(vals <= 0):
            # a signed driving parameter cannot live on the log scale; the
            # sign-rotation rule restores direction at evaluation time
            scale = "identity"
        fns.append(ParamFunction(
            ParamForm.PIECEWISE_LINEAR, tuple(vals), knots=tuple(knots), scale=scale
        ))
    return tuple(fns)


def fit_nonsimplified_binned(
    data: np.ndarray,
    bins: int = 8,
    bootstrap: int = 200,
    families: list[tuple[Family, int]] | None = None,
    seed: int = 0,
) -> tuple[VineSpec3D, TauCurveEstimate]:
    """Binned conditional-parameter estimator.

    Unconditional pairs as in :func:`fit_simplified_vine`; the conditional
    pseudo-observations are split into equal-count bins over the conditioning
    variable, one family (chosen by pooled AIC under a shared-family
    constraint) is fitted per bin, and the per-bin parameters are interpolated
    into a piecewise-linear parameter function. Bootstrap resampling of rows
    with rebinned refits yields percentile bands for the tau curve.
    """
    x = np.asarray(data, dtype=float)
    if bins < 1:
        raise DomainError("bins must be >= 1")
    if x.shape[0] < 50 * bins:
        raise BinTooSmall(f"need at least {50 * bins} rows for {bins} bins")
    order, fit12, fit23, u2, v, w = _fit_tree1(x, families)
    vw_u2 = np.column_stack([v, w, u2])
    qs = np.quantile(u2, np.linspace(0.0, 1.0, bins + 1))
    qs[0], qs[-1] = 0.0, 1.0

    shared_fams = [Family.INDEPENDENCE, Family.GAUSSIAN, Family.STUDENT_T, Family.FRANK,
                   Family.CLAYTON, Family.GUMBEL, Family.JOE, Family.AMH]
    best = None
    for fam in shared_fams:
        try:
            knots, signed_params, taus, pooled_ll, n_par = _fit_bins(vw_u2, qs, fam)
        except BinTooSmall:
            raise
        except Exception:
            continue
        pooled_aic = -2.0 * pooled_ll + 2.0 * n_par * bins
        key = (pooled_aic, -pooled_ll, _FAMILY_ORDER[fam])
        if best is None or key < best[0]:
            best = (key, fam, knots, signed_params, taus)
    if best is None:
        raise AllFitsFailed("no shared family fitted all bins")
    _, fam, knots, signed_params, taus = best

    if fam is Family.INDEPENDENCE:
        cond = ConditionalPair(family=Family.INDEPENDENCE)
    else:
        fns = _pwl_functions(fam, knots, signed_params)
        driving = np.array([p[0] for p in signed_params])
        sign_rot = 90 if (fam not in _SIGN_FLEXIBLE and np.any(driving < 0)) else None
        cond = ConditionalPair(
            family=fam, base_rotation=0, param_fns=fns, sign_rotation=sign_rot
        )
    spec = VineSpec3D(
        c12=fit12.copula, c23=fit23.copula, c13_2=cond,
        margins=Margins.STD_NORMAL, order=order,
    )

    rng = np.random.Generator(np.random.Philox(int(seed)))
    boot_taus = []
    for _ in range(int(bootstrap)):
        idx = rng.integers(0, vw_u2.shape[0], size=vw_u2.shape[0])
        sub = vw_u2[idx]
        bq = np.quantile(sub[:, 2], np.linspace(0.0, 1.0, bins + 1))
        bq[0], bq[-1] = 0.0, 1.0
        try:
            _, _, btaus, _, _ = _fit_bins(sub, bq, fam)
            boot_taus.append(btaus)
        except Exception:
            continue
    if boot_taus:
        bt = np.array(boot_taus)
        ci_lo = np.minimum(np.percentile(bt, 2.5, axis=0), taus)
        ci_hi = np.maximum(np.percentile(bt, 97.5, axis=0), taus)
    else:
        ci_lo = taus.copy()
        ci_hi = taus.copy()
    curve = TauCurveEstimate(grid=knots, tau_hat=taus, ci_lo=ci_lo, ci_hi=ci_hi, family=fam)
    return spec, curve


def refit_sample(spec: VineSpec3D, s: SampleMatrix,
                 families: list[tuple[Family, int]] | None = None) -> VineSpec3D:
    """Convenience: fit a simplified vine to a uniform-scale sample matrix."""
    return fit_simplified_vine(s.data, families=families)
