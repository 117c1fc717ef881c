"""Registry of built-in vine models.

Eight constructed scenarios (four simplified, four non-simplified) plus the
simulation-study truth. Each entry carries the reference values used by the
acceptance suite, tagged with the kind of report they come from; the registry
is the single source for those constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownScenario
from .families import BivariateCopula, Family
from .vine import ConditionalPair, ParamForm, ParamFunction, VineSpec3D


@dataclass(frozen=True)
class ExpectedValue:
    """A reference number with either a tolerance or an interval."""

    source: str
    value: float | None = None
    tol: float | None = None
    lo: float | None = None
    hi: float | None = None

    def check(self, actual: float) -> bool:
        if self.lo is not None or self.hi is not None:
            lo = -float("inf") if self.lo is None else self.lo
            hi = float("inf") if self.hi is None else self.hi
            return lo <= actual <= hi
        assert self.value is not None and self.tol is not None
        return abs(actual - self.value) <= self.tol


@dataclass(frozen=True)
class ScenarioEntry:
    id: str
    spec: VineSpec3D
    description: str
    expected: dict[str, ExpectedValue] = field(default_factory=dict)
    # non-numeric reference facts (reported family labels and the like)
    expected_labels: dict[str, str] = field(default_factory=dict)


def _bc(family: Family, *params: float, rotation: int = 0) -> BivariateCopula:
    return BivariateCopula(family, rotation, tuple(params))


def _cond(family: Family, *fns: ParamFunction, base_rotation: int = 0,
          sign_rotation: int | None = None) -> ConditionalPair:
    return ConditionalPair(
        family=family, base_rotation=base_rotation, param_fns=tuple(fns),
        sign_rotation=sign_rotation,
    )


_TBL = "scenario table"
_TXT = "scenario narrative"
_FIT = "reported simplified-approximation fit"
_SIM = "reported simulation-study fit"


def _build_registry() -> dict[str, ScenarioEntry]:
    entries: list[ScenarioEntry] = []

    entries.append(ScenarioEntry(
        id="S1",
        spec=VineSpec3D(
            c12=_bc(Family.GAUSSIAN, 0.6),
            c23=_bc(Family.GAUSSIAN, 0.7),
            c13_2=_cond(Family.GAUSSIAN, ParamFunction.constant(0.5)),
        ),
        description="All-Gaussian simplified vine; the joint law is a trivariate "
                    "Gaussian copula and the implied 1-3 margin is Gaussian.",
        expected={
            "tau_12": ExpectedValue(_TBL, value=0.41, tol=0.005),
            "tau_23": ExpectedValue(_TBL, value=0.49, tol=0.005),
            "tau_cond": ExpectedValue(_TBL, value=0.33, tol=0.005),
            "tau_13": ExpectedValue(_TBL, value=0.50, tol=0.005),
            "implied_rho_13": ExpectedValue(_TXT, value=0.71, tol=0.005),
        },
    ))

    entries.append(ScenarioEntry(
        id="S2",
        spec=VineSpec3D(
            c12=_bc(Family.CLAYTON, 2.0),
            c23=_bc(Family.CLAYTON, 2.0),
            c13_2=_cond(Family.CLAYTON, ParamFunction.constant(2.0 / 3.0)),
        ),
        description="Trivariate Clayton copula written as a simplified vine; "
                    "the conditional pair is Clayton with parameter theta/(theta+1) "
                    "and all three bivariate margins coincide.",
        expected={
            "tau_12": ExpectedValue(_TBL, value=0.50, tol=0.005),
            "tau_23": ExpectedValue(_TBL, value=0.50, tol=0.005),
            "tau_cond": ExpectedValue(_TBL, value=0.25, tol=0.005),
            "cond_param": ExpectedValue(_TBL, value=0.67, tol=0.005),
        },
    ))

    entries.append(ScenarioEntry(
        id="S3",
        spec=VineSpec3D(
            c12=_bc(Family.FRANK, 7.0),
            c23=_bc(Family.GUMBEL, 2.0),
            c13_2=_cond(Family.GAUSSIAN, ParamFunction.constant(-0.7)),
        ),
        description="Mixed simplified vine: Frank and Gumbel unconditional pairs "
                    "with a negative Gaussian conditional pair.",
        expected={
            "tau_12": ExpectedValue(_TBL, value=0.56, tol=0.005),
            "tau_23": ExpectedValue(_TBL, value=0.50, tol=0.005),
            "tau_cond": ExpectedValue(_TBL, value=-0.49, tol=0.005),
        },
    ))

    entries.append(ScenarioEntry(
        id="S4",
        spec=VineSpec3D(
            c12=_bc(Family.TAWN1, 3.0, 0.3),
            c23=_bc(Family.JOE, 2.0, rotation=270),
            c13_2=_cond(
                Family.BB1,
                ParamFunction.constant(2.0),
                ParamFunction.constant(1.5),
            ),
        ),
        description="Mixed simplified vine with a non-exchangeable Tawn pair, a "
                    "rotated Joe pair and a two-parameter conditional pair.",
        expected={
            "tau_12": ExpectedValue(_TBL, value=0.25, tol=0.005),
            "tau_23": ExpectedValue(_TBL, value=-0.36, tol=0.005),
            "tau_cond": ExpectedValue(_TBL, value=0.67, tol=0.005),
        },
    ))

    entries.append(ScenarioEntry(
        id="S5",
        spec=VineSpec3D(
            c12=_bc(Family.GAUSSIAN, 0.0),
            c23=_bc(Family.GAUSSIAN, 0.0),
            c13_2=_cond(Family.GAUSSIAN, ParamFunction(ParamForm.SINE, (0.9,))),
        ),
        description="Non-simplified Gaussian vine: independent unconditional "
                    "pairs isolate a sinusoidal conditional correlation; the "
                    "density is bimodal and its high-level contour surfaces "
                    "disconnect.",
        expected={
            "tau_12": ExpectedValue(_TBL, value=0.0, tol=0.005),
            "tau_23": ExpectedValue(_TBL, value=0.0, tol=0.005),
            "tau_curve_max": ExpectedValue(_TXT, value=0.71, tol=0.01),
            "tau_curve_min": ExpectedValue(_TXT, value=-0.71, tol=0.01),
            "approx_rho": ExpectedValue(_FIT, value=0.01, lo=-0.05, hi=0.05),
            "approx_nu": ExpectedValue(_FIT, value=2.15, lo=1.5, hi=3.0),
        },
        expected_labels={"approx_family": "student_t"},
    ))

    entries.append(ScenarioEntry(
        id="S6",
        spec=VineSpec3D(
            c12=_bc(Family.CLAYTON, 2.0, rotation=90),
            c23=_bc(Family.CLAYTON, 2.0),
            c13_2=_cond(
                Family.CLAYTON, ParamFunction(ParamForm.QUADRATIC, (9.0, 0.5, 0.25))
            ),
        ),
        description="Non-simplified Clayton vine with a parabolic conditional "
                    "dependence parameter that vanishes at both ends of the "
                    "conditioning range.",
        expected={
            "tau_12": ExpectedValue(_TBL, value=-0.50, tol=0.005),
            "tau_23": ExpectedValue(_TBL, value=0.50, tol=0.005),
            "tau_curve_max": ExpectedValue(_TXT, value=0.53, tol=0.01),
            "tau_curve_argmax": ExpectedValue(_TXT, value=0.5, tol=0.01),
            "tau_curve_min": ExpectedValue(_TXT, value=0.0, tol=0.01),
            # The survival-BB6 identity of this fit is treated as soft: the
            # family label of a likelihood winner is sample-dependent.
            "approx_tau": ExpectedValue(_FIT, value=0.39, tol=0.06),
        },
    ))

    entries.append(ScenarioEntry(
        id="S7",
        spec=VineSpec3D(
            c12=_bc(Family.FRANK, 8.0),
            c23=_bc(Family.FRANK, 8.0),
            c13_2=_cond(Family.AMH, ParamFunction(ParamForm.EXP_SATURATION, (8.0,))),
        ),
        description="Trivariate Frank copula as a non-simplified vine: Frank "
                    "margins with an AMH conditional pair whose parameter "
                    "saturates in the conditioning value.",
        expected={
            "tau_12": ExpectedValue(_TBL, value=0.60, tol=0.005),
            "tau_23": ExpectedValue(_TBL, value=0.60, tol=0.005),
            "approx_tau": ExpectedValue(_FIT, value=0.28, lo=0.25, hi=0.31),
        },
    ))

    entries.append(ScenarioEntry(
        id="S8",
        spec=VineSpec3D(
            c12=_bc(Family.BB8, 6.0, 0.95),
            c23=_bc(Family.GUMBEL, 3.5, rotation=270),
            c13_2=_cond(
                Family.TAWN2,
                ParamFunction(ParamForm.SIGN_COSINE, (4.0, 3.0, 4.0)),
                ParamFunction(ParamForm.LINEAR, (0.1, 0.8)),
                sign_rotation=90,
            ),
        ),
        description="Strongly dependent mixed non-simplified vine; the Tawn "
                    "conditional pair switches to its 90-degree rotation where "
                    "the driving parameter turns negative.",
        expected={
            "tau_12": ExpectedValue(_TBL, value=0.69, tol=0.005),
            "tau_23": ExpectedValue(_TBL, value=-0.71, tol=0.005),
            "tau_curve_min": ExpectedValue(_TXT, value=-0.39, tol=0.01),
            "tau_curve_max": ExpectedValue(_TXT, value=0.71, tol=0.01),
            "approx_rho": ExpectedValue(_FIT, value=0.18, lo=0.13, hi=0.23),
            "approx_nu": ExpectedValue(_FIT, value=2.6, lo=1.8, hi=3.4),
            "approx_tau": ExpectedValue(_FIT, value=0.11, tol=0.04),
        },
        expected_labels={"approx_family": "student_t"},
    ))

    entries.append(ScenarioEntry(
        id="SIM5.1",
        spec=VineSpec3D(
            c12=_bc(Family.GUMBEL, 1.5),
            c23=_bc(Family.STUDENT_T, 0.0, 2.5),
            c13_2=_cond(Family.FRANK, ParamFunction(ParamForm.ARCTAN, (3.0, 10.0, 0.5))),
        ),
        description="Simulation-study truth: weak unconditional dependence with "
                    "a sign-switching Frank conditional pair; the density stays "
                    "below the innermost default contour level.",
        expected={
            "tau_12": ExpectedValue(_TBL, value=1.0 / 3.0, tol=0.005),
            "tau_23": ExpectedValue(_TBL, value=0.0, tol=0.005),
            "density_max": ExpectedValue(_TXT, value=0.101, lo=0.095, hi=0.102),
            "fit_theta_12": ExpectedValue(_SIM, value=1.49, lo=1.41, hi=1.57),
            "fit_rho_23": ExpectedValue(_SIM, value=0.04, lo=-0.01, hi=0.09),
            "fit_nu_23": ExpectedValue(_SIM, value=2.36, lo=1.8, hi=3.0),
            "fit_cond_abs_rho_max": ExpectedValue(_SIM, value=0.0, lo=0.0, hi=0.05),
            "fit_cond_nu_lo": ExpectedValue(_SIM, value=2.0, lo=2.0, hi=2.0),
            "fit_cond_nu_hi": ExpectedValue(_SIM, value=12.0, lo=12.0, hi=12.0),
            "binned_tau_lo": ExpectedValue(_SIM, value=-0.45, lo=-0.45, hi=-0.45),
            "binned_tau_hi": ExpectedValue(_SIM, value=0.45, lo=0.45, hi=0.45),
        },
        expected_labels={"fit_family_12": "gumbel", "fit_family_23": "student_t"},
    ))

    return {e.id: e for e in entries}


_REGISTRY = _build_registry()


def get(scenario_id: str) -> ScenarioEntry:
    try:
        return _REGISTRY[scenario_id]
    except KeyError:
        raise UnknownScenario(
            f"unknown scenario {scenario_id!r}; known: {', '.join(sorted(_REGISTRY))}"
        ) from None


def list_entries() -> list[ScenarioEntry]:
    return [(_REGISTRY[k]) for k in sorted(_REGISTRY)]


def gallery_json() -> list[dict]:
    """Viewer-facing bundle: id, description and the full spec per entry."""
    return [
        {"id": e.id, "description": e.description, "spec": e.spec.to_json()}
        for e in list_entries()
    ]
