"""Explicit upper bounds on the L1 distance between two additive process laws.

Each bound checks its own applicability hypotheses on the process pair and
raises HypothesisFailed (with a short reason) when they do not hold; the
report aggregator converts those failures into not-applicable entries. Raw
bound values are kept unclamped (the sinh bound explodes for large horizons);
only the report's `best` clamps every applicable bound to the trivial ceiling
of 2 before taking the minimum.

Applicability is decided by the volatility class of the pair: shared positive
volatility activates the Gaussian-smoothing terms, shared zero volatility
requires the drift gap to match the compensated jump drift exactly, and any
volatility mismatch or partial degeneracy leaves only the trivial bound.
"""

import math
from dataclasses import dataclass

from scipy import special

from .errors import (
    DivergentIntegral,
    HypothesisFailed,
    NotAbsolutelyContinuous,
    NotGaussianCase,
    ZeroVolatility,
)
from .measures import ZeroMeasure, gamma_nu, hellinger_sq, l1_distance
from .processes import ProblemSpec

# The L1 distance between probability laws never exceeds 2.
TRIVIAL_BOUND = 2.0
_SINH_OVERFLOW = 700.0
_SQRT8 = math.sqrt(8.0)
_INV_2SQRT2 = 1.0 / (2.0 * math.sqrt(2.0))


def normal_cdf(x):
    """Standard normal CDF, accurate in both tails (erfc-based)."""
    return special.ndtr(x)


def _gaussian_term(xi_sq: float) -> float:
    """2 (1 - 2 Phi(-xi/2)), evaluated as 2 erf(xi / (2 sqrt 2)) so small
    distances keep full relative precision."""
    if math.isinf(xi_sq):
        return 2.0
    return float(2.0 * special.erf(math.sqrt(xi_sq) * _INV_2SQRT2))


def gaussian_tv_exact(spec: ProblemSpec) -> float:
    """Exact L1 distance for purely Gaussian pairs (no jumps, shared sigma > 0)."""
    if not (
        isinstance(spec.process1.levy, ZeroMeasure)
        and isinstance(spec.process2.levy, ZeroMeasure)
    ):
        raise NotGaussianCase("exact value requires both Levy measures to be Zero")
    if spec.sigma_mismatch():
        raise ZeroVolatility("instantaneous variances differ on [0, T]")
    if spec.vol_class() != "positive":
        raise ZeroVolatility("exact Gaussian distance needs sigma^2 > 0 on [0, T]")
    return _gaussian_term(spec.xi_sq())


def _shared_vol_class(spec: ProblemSpec) -> str:
    if spec.sigma_mismatch():
        raise HypothesisFailed("sigma mismatch")
    cls = spec.vol_class()
    if cls == "degenerate":
        raise HypothesisFailed("sigma^2 vanishes on part of [0, T]")
    return cls


def _require_drift_match(spec: ProblemSpec) -> None:
    try:
        matched = spec.drift_matched()
    except DivergentIntegral:
        raise HypothesisFailed("eta divergent") from None
    if not matched:
        raise HypothesisFailed("drift mismatch at sigma = 0")


def _xi_sq_checked(spec: ProblemSpec) -> float:
    try:
        xi_sq = spec.xi_sq()
    except DivergentIntegral:
        raise HypothesisFailed("eta divergent") from None
    if math.isinf(xi_sq):
        raise HypothesisFailed("xi^2 infinite")
    return xi_sq


def bound_thm1(spec: ProblemSpec) -> float:
    """Hellinger-route bound sqrt(8 (1 - exp(-xi^2/8 - T H^2 / 2))).

    Under shared zero volatility (drift-matched) the xi^2 term drops.
    """
    cls = _shared_vol_class(spec)
    try:
        h2 = hellinger_sq(spec.process1.levy, spec.process2.levy)
    except NotAbsolutelyContinuous:
        raise HypothesisFailed("not-abs-continuous") from None
    if math.isinf(h2):
        raise HypothesisFailed("H^2 infinite")
    if cls == "zero":
        _require_drift_match(spec)
        xi_sq = 0.0
    else:
        xi_sq = _xi_sq_checked(spec)
    arg = 0.125 * xi_sq + 0.5 * spec.horizon * h2
    return _SQRT8 * math.sqrt(-math.expm1(-arg))


def bound_thm2(spec: ProblemSpec) -> float:
    """Coupling bound 2 sinh(T L1(nu)) plus, under positive volatility, the
    Gaussian drift term 2 (1 - 2 Phi(-xi/2)). Raw value; may exceed 2."""
    cls = _shared_vol_class(spec)
    try:
        l1 = l1_distance(spec.process1.levy, spec.process2.levy)
    except NotAbsolutelyContinuous:
        raise HypothesisFailed("not-abs-continuous") from None
    if math.isinf(l1):
        raise HypothesisFailed("L1 infinite")
    if cls == "zero":
        _require_drift_match(spec)
        gauss = 0.0
    else:
        gauss = _gaussian_term(_xi_sq_checked(spec))
    z = spec.horizon * l1
    if z >= _SINH_OVERFLOW:
        return math.inf
    return 2.0 * math.sinh(z) + gauss


def bound_simple_sqrt(spec: ProblemSpec) -> float:
    """Small-gap bound 2 sqrt(T L1(nu)): zero volatility, matched drift only."""
    cls = _shared_vol_class(spec)
    if cls != "zero":
        raise HypothesisFailed("applies only under shared zero volatility")
    _require_drift_match(spec)
    try:
        l1 = l1_distance(spec.process1.levy, spec.process2.levy)
    except NotAbsolutelyContinuous:
        raise HypothesisFailed("not-abs-continuous") from None
    if math.isinf(l1):
        raise HypothesisFailed("L1 infinite")
    return 2.0 * math.sqrt(spec.horizon * l1)


@dataclass(frozen=True)
class BoundReport:
    """All computed ingredients and bounds for one process pair.

    Numeric fields are None when the quantity does not apply or could not be
    computed; the matching entry in `reasons` says why. Bound values are raw
    (unclamped); `best` is the minimum applicable bound clamped to [0, 2],
    or 2 when nothing applies.
    """

    horizon: float
    vol_class: str
    sigma_mismatch: bool
    drift_matched: bool | None
    l1_nu: float | None
    hellinger_sq_nu: float | None
    eta: float | None
    gamma1: float | None
    gamma2: float | None
    xi_sq: float | None
    thm1: float | None
    thm2: float | None
    simple_sqrt: float | None
    gaussian_exact: float | None
    best: float
    reasons: dict


def compute_report(spec: ProblemSpec) -> BoundReport:
    """Evaluate every ingredient and every applicable bound for the pair."""
    nu1 = spec.process1.levy
    nu2 = spec.process2.levy
    reasons: dict[str, str] = {}

    mismatch = spec.sigma_mismatch()
    vol_class = spec.vol_class()

    # Measure-level ingredients do not depend on the volatility.
    try:
        l1_nu = l1_distance(nu1, nu2)
        hell = hellinger_sq(nu1, nu2)
    except NotAbsolutelyContinuous as exc:
        l1_nu = hell = None
        reasons["l1_nu"] = reasons["hellinger_sq_nu"] = str(exc)

    try:
        eta = spec.eta()
    except DivergentIntegral as exc:
        eta = None
        reasons["eta"] = str(exc)

    gamma1 = gamma2 = None
    for key, nu in (("gamma1", nu1), ("gamma2", nu2)):
        try:
            value = gamma_nu(nu)
        except DivergentIntegral as exc:
            reasons[key] = str(exc)
        else:
            if key == "gamma1":
                gamma1 = value
            else:
                gamma2 = value

    xi_sq = None
    if mismatch:
        reasons["xi_sq"] = "instantaneous variances differ on [0, T]"
    elif vol_class == "positive":
        try:
            xi_sq = spec.xi_sq()
        except DivergentIntegral as exc:
            reasons["xi_sq"] = str(exc)
    else:
        reasons["xi_sq"] = "undefined without positive shared volatility"

    drift_matched = None
    if not mismatch and vol_class == "zero" and eta is not None:
        drift_matched = spec.drift_matched()

    values = {}
    for key, fn in (
        ("thm1", bound_thm1),
        ("thm2", bound_thm2),
        ("simple_sqrt", bound_simple_sqrt),
    ):
        try:
            values[key] = fn(spec)
        except HypothesisFailed as exc:
            values[key] = None
            reasons[key] = exc.reason

    try:
        gaussian_exact = gaussian_tv_exact(spec)
    except (NotGaussianCase, ZeroVolatility) as exc:
        gaussian_exact = None
        reasons["gaussian_exact"] = str(exc)

    candidates = [
        min(v, TRIVIAL_BOUND)
        for v in (values["thm1"], values["thm2"], values["simple_sqrt"], gaussian_exact)
        if v is not None
    ]
    best = min(candidates) if candidates else TRIVIAL_BOUND

    return BoundReport(
        horizon=spec.horizon,
        vol_class=vol_class,
        sigma_mismatch=mismatch,
        drift_matched=drift_matched,
        l1_nu=l1_nu,
        hellinger_sq_nu=hell,
        eta=eta,
        gamma1=gamma1,
        gamma2=gamma2,
        xi_sq=xi_sq,
        thm1=values["thm1"],
        thm2=values["thm2"],
        simple_sqrt=values["simple_sqrt"],
        gaussian_exact=gaussian_exact,
        best=best,
        reasons=reasons,
    )
