"""Sharp inequality checks and their equality witnesses.

Every statement verified here couples three orders through
(alpha - beta)(alpha - gamma) = (alpha - 1)^2 and bounds an
entropy-plus-divergence combination by a single cross functional.  The
checkers assemble both sides in log scale, orient the gap so the expected
sign is nonnegative (the comparison reverses when alpha < beta), and carry
the certified quadrature error next to the verdict.

Equality witnesses come in two flavours.  Jensen's equality case forces
g proportional to f^k with k = (alpha-1)/(gamma-1), which transported
through each transform yields the "corrected" witnesses.  The published
equality conditions use the reciprocal exponent (1-beta)/(alpha-beta)
instead; those are kept verbatim under mode "paper" so the reports can
adjudicate between the two (only the corrected exponent closes the gap).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from .densities import Density, Modifier, NumericDensity
from .errors import DegenerateParameters, PreconditionViolated
from .functionals import (
    ParameterTriple,
    _common_support,
    _cross_down_exponents,
    cross_divergence,
    cross_upper_moment,
    log_power_integral,
    renyi_divergence,
    tail_table,
    upper_moment,
)
from .quadrature import DEFAULT_CONFIG, Interval, QuadratureConfig, probe_grid

__all__ = [
    "TheoremId",
    "CheckReport",
    "WitnessExponents",
    "IdentityResiduals",
    "solve_triple",
    "solve_beta",
    "witness_exponents",
    "witness_modifier",
    "equality_witness",
    "check_rrr",
    "check_escort",
    "check_rel_escort",
    "check_bip_down",
    "check_down_fisher",
    "check_up",
    "check_upper_mom",
    "run_check",
    "cross_divergence_identities",
]


class TheoremId(Enum):
    """The eight sharp bounds, named by the functional pair they relate."""

    RRR = "rrr"
    ESCORT = "escort"
    REL_ESCORT = "rel_escort"
    BIP_DOWN = "bip_down"
    DOWN_FISHER = "down_fisher"
    UP = "up"
    UP_EXP = "up_exp"
    UPPER_MOMENT = "upper_mom"

    @property
    def extra_names(self) -> tuple[str, ...]:
        return _EXTRA_NAMES[self]


_EXTRA_NAMES: dict[TheoremId, tuple[str, ...]] = {
    TheoremId.RRR: (),
    TheoremId.ESCORT: ("xi",),
    TheoremId.REL_ESCORT: ("h", "xi"),
    TheoremId.BIP_DOWN: ("a", "b"),
    TheoremId.DOWN_FISHER: ("a", "b", "xi"),
    TheoremId.UP: ("a",),
    TheoremId.UP_EXP: (),
    TheoremId.UPPER_MOMENT: ("a", "b"),
}


@dataclass(frozen=True)
class WitnessExponents:
    """Equality exponents attached to a coupled triple.

    ``k`` is the Jensen-derived escort exponent of the witness g = f^k,
    ``tilt`` = k - 1 is the excess applied on top of f itself, and
    ``paper_k`` is the reciprocal exponent as published.  The coupling
    relation makes tilt = (alpha-1)/(1-beta).
    """

    k: float
    tilt: float
    paper_k: float

    @property
    def paper_tilt(self) -> float:
        return self.paper_k - 1.0

    def tilt_for(self, mode: str) -> float:
        if mode == "corrected":
            return self.tilt
        if mode == "paper":
            return self.paper_tilt
        raise ValueError(f"witness mode must be 'corrected' or 'paper', got {mode!r}")

    def derivative_exponents(self, a: float, b: float, mode: str = "corrected") -> tuple[float, float]:
        """(A, B) of the g = f^A |f'|^B equality condition at weights (a, b)."""
        t = self.tilt_for(mode)
        return 1.0 + a * t, -b * t


def witness_exponents(triple: ParameterTriple) -> WitnessExponents:
    return WitnessExponents(
        k=(triple.alpha - 1.0) / (triple.gamma - 1.0),
        tilt=(triple.alpha - 1.0) / (1.0 - triple.beta),
        paper_k=(1.0 - triple.beta) / (triple.alpha - triple.beta),
    )


@dataclass(frozen=True)
class CheckReport:
    """One inequality evaluation: both sides, oriented gap, verdict."""

    theorem: TheoremId
    params: ParameterTriple
    extras: dict[str, Any]
    lhs: float
    rhs: float
    gap: float
    direction: str
    quad_error: float
    passed: bool
    conditioning_warning: bool

    def to_record(self) -> dict[str, Any]:
        """Flat JSON-ready record with densities rendered as spec strings."""
        extras = {
            name: (str(value) if isinstance(value, Density) else value)
            for name, value in self.extras.items()
        }
        return {
            "theorem": self.theorem.value,
            "alpha": self.params.alpha,
            "beta": self.params.beta,
            "gamma": self.params.gamma,
            "extras": extras,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "direction": self.direction,
            "quad_error": self.quad_error,
            "pass": self.passed,
            "warning": self.conditioning_warning,
        }


@dataclass(frozen=True)
class IdentityResiduals:
    """Absolute residuals of the cross-divergence reduction identities."""

    residuals: dict[str, float]

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


# --- order coupling -------------------------------------------------------------


def solve_triple(alpha: float, beta: float) -> ParameterTriple:
    """Complete (alpha, beta) to the coupled triple.

    gamma = alpha - (alpha-1)^2/(alpha-beta).  The third order never lands
    on 1 because gamma - 1 = (alpha-1)(1-beta)/(alpha-beta).
    """
    if alpha == beta:
        raise DegenerateParameters("alpha = beta collapses the coupling relation")
    if alpha == 1.0 or beta == 1.0:
        raise DegenerateParameters("the coupling needs alpha != 1 and beta != 1")
    gamma = alpha - (alpha - 1.0) ** 2 / (alpha - beta)
    return ParameterTriple(alpha, beta, gamma)


def solve_beta(alpha: float, gamma: float) -> ParameterTriple:
    """Complete (alpha, gamma) to the coupled triple, solving for beta."""
    if alpha == gamma:
        raise DegenerateParameters("alpha = gamma collapses the coupling relation")
    if alpha == 1.0 or gamma == 1.0:
        raise DegenerateParameters("the coupling needs alpha != 1 and gamma != 1")
    beta = alpha - (alpha - 1.0) ** 2 / (alpha - gamma)
    return ParameterTriple(alpha, beta, gamma)


# --- equality witnesses ----------------------------------------------------------


def _require_extras(theorem: TheoremId, extras: dict[str, Any]) -> None:
    if set(extras) != set(theorem.extra_names):
        raise TypeError(
            f"{theorem.value} takes extras {sorted(theorem.extra_names)},"
            f" got {sorted(extras)}"
        )


def witness_modifier(
    theorem: TheoremId,
    alpha: float,
    beta: float,
    mode: str = "corrected",
    tilt: float | None = None,
    **extras: Any,
) -> Modifier:
    """Reshaping of f that turns the theorem's bound into an equality.

    The master rule demands that the reciprocal transform of g reproduce
    the k-th power of the transformed f; expanding it per theorem gives the
    exponent bundles below.  ``tilt`` overrides the mode-derived excess
    k - 1 (the optimality tests perturb it to confirm the gap is locally
    minimal at the witness).
    """
    _require_extras(theorem, extras)
    exps = witness_exponents(solve_triple(alpha, beta))
    t = exps.tilt_for(mode) if tilt is None else tilt
    if theorem is TheoremId.RRR:
        return Modifier(power_base=1.0 + t)
    if theorem is TheoremId.ESCORT:
        return Modifier(power_base=1.0 + extras["xi"] * t)
    if theorem is TheoremId.REL_ESCORT:
        return Modifier(power_rel=extras["xi"] * t, relative=extras["h"])
    if theorem is TheoremId.BIP_DOWN:
        a, b = extras["a"], extras["b"]
        return Modifier(power_base=1.0 + a * t, power_deriv=-b * t)
    if theorem is TheoremId.DOWN_FISHER:
        a, b, xi = extras["a"], extras["b"], extras["xi"]
        # outer master rule at weights (a, b) applied to the xi-down image
        # of the pair; pulling back through the image's derivative
        # f^(2 xi - 2) |f'|^(-1) (r - xi), r = f f''/f'^2, leaves f-powers,
        # a derivative power, and a curvature factor
        return Modifier(
            power_base=1.0 + t * (a * xi + 2.0 * b * (1.0 - xi)),
            power_deriv=t * (b - a),
            power_curv=-b * t,
            curv_offset=xi,
        )
    if theorem is TheoremId.UP:
        a = extras["a"]
        if a == 2.0:
            raise DegenerateParameters("weight index 2 is the exponential branch (UP_EXP)")
        return Modifier(power_abs_x=t / (2.0 - a))
    if theorem is TheoremId.UP_EXP:
        return Modifier(exp_rate=-t)
    if theorem is TheoremId.UPPER_MOMENT:
        a, b = extras["a"], extras["b"]
        if a == 2.0 or b == 2.0:
            raise DegenerateParameters("tail index 2 has no power-weight form")
        return Modifier(power_tail=t / (2.0 - a), tail_index=b)
    raise ValueError(f"unknown theorem {theorem!r}")


def equality_witness(
    theorem: TheoremId,
    f: Density,
    alpha: float,
    beta: float,
    mode: str = "corrected",
    tilt: float | None = None,
    config: QuadratureConfig = DEFAULT_CONFIG,
    **extras: Any,
) -> NumericDensity:
    """Normalized equality witness g for the theorem at (alpha, beta)."""
    modifier = witness_modifier(theorem, alpha, beta, mode=mode, tilt=tilt, **extras)
    return NumericDensity(f, modifier, config)


# --- checkers --------------------------------------------------------------------


def _log_term(
    support: Interval,
    denom: float,
    config: QuadratureConfig,
    **bundle: Any,
) -> tuple[float, float]:
    """(log integral)/denom together with the error scaled the same way."""
    res = log_power_integral(support, config=config, **bundle)
    return res.log_value / denom, abs(res.log_error / denom)


def _divergence_term(
    f: Density, g: Density, beta: float, support: Interval, config: QuadratureConfig
) -> tuple[float, float]:
    return _log_term(support, beta - 1.0, config, pdf=[(f, beta), (g, 1.0 - beta)])


def _assemble(
    theorem: TheoremId,
    triple: ParameterTriple,
    extras: dict[str, Any],
    lhs: float,
    rhs: float,
    quad_error: float,
) -> CheckReport:
    flipped = triple.alpha < triple.beta
    gap = (lhs - rhs) if flipped else (rhs - lhs)
    return CheckReport(
        theorem=theorem,
        params=triple,
        extras=extras,
        lhs=lhs,
        rhs=rhs,
        gap=gap,
        direction="reversed" if flipped else "normal",
        quad_error=quad_error,
        passed=bool(gap >= -max(1e-7, 10.0 * quad_error)),
        conditioning_warning=triple.conditioning_warning,
    )


def _require_decreasing(f: Density) -> None:
    if not f.decreasing:
        raise PreconditionViolated(f"{f} must be decreasing on its support")


def _require_curvature_below(f: Density, xi: float, n: int = 257) -> None:
    """Sampled sup of r = f f''/f'^2 must stay strictly below xi."""
    xs = probe_grid(f.support, n)
    r = f.curvature(xs)
    r = r[np.isfinite(r)]
    if r.size == 0:
        raise PreconditionViolated(f"curvature ratio of {f} is nowhere finite")
    top = float(np.max(r))
    if not top < xi:
        raise PreconditionViolated(f"curvature ratio of {f} reaches {top}, needs < {xi}")


def check_rrr(
    f: Density,
    g: Density,
    alpha: float,
    beta: float,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> CheckReport:
    """Order-alpha entropy of f plus order-beta divergence against the
    order-gamma cross-entropy."""
    triple = solve_triple(alpha, beta)
    support = _common_support(f, g)
    entropy, e1 = _log_term(support, 1.0 - alpha, config, pdf=[(f, alpha)])
    div, e2 = _divergence_term(f, g, beta, support, config)
    cross, e3 = _log_term(
        support, 1.0 - triple.gamma, config, pdf=[(f, 1.0), (g, triple.gamma - 1.0)]
    )
    return _assemble(TheoremId.RRR, triple, {}, entropy + div, cross, e1 + e2 + e3)


def check_escort(
    f: Density,
    g: Density,
    alpha: float,
    beta: float,
    xi: float,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> CheckReport:
    """xi-escort entropy plus divergence against the escort cross-entropy.

    The escort term xi R_{1+(alpha-1)xi}[f] contracts to
    (log int f^{1+(alpha-1)xi})/(1-alpha), which degrades gracefully to 0
    at xi = 0 where the integral is the unit mass.
    """
    triple = solve_triple(alpha, beta)
    support = _common_support(f, g)
    gamma = triple.gamma
    entropy, e1 = _log_term(
        support, 1.0 - alpha, config, pdf=[(f, 1.0 + (alpha - 1.0) * xi)]
    )
    div, e2 = _divergence_term(f, g, beta, support, config)
    cross, e3 = _log_term(
        support,
        1.0 - gamma,
        config,
        pdf=[(f, 1.0 + (xi - 1.0) * (gamma - 1.0)), (g, gamma - 1.0)],
    )
    return _assemble(
        TheoremId.ESCORT, triple, {"xi": xi}, entropy + div, cross, e1 + e2 + e3
    )


def check_rel_escort(
    f: Density,
    g: Density,
    h: Density,
    alpha: float,
    beta: float,
    xi: float,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> CheckReport:
    """Divergence difference D_beta[f||g] - xi D_{1+(alpha-1)xi}[f||h]
    against the cross-divergence with reference h."""
    triple = solve_triple(alpha, beta)
    support = _common_support(f, g, h)
    gamma = triple.gamma
    div, e1 = _divergence_term(f, g, beta, support, config)
    # xi D_{1+(alpha-1)xi}[f||h] contracts the same way the escort term does
    rel, e2 = _log_term(
        support,
        alpha - 1.0,
        config,
        pdf=[(f, 1.0 + (alpha - 1.0) * xi), (h, (1.0 - alpha) * xi)],
    )
    cross, e3 = _log_term(
        support,
        1.0 - gamma,
        config,
        pdf=[
            (f, 1.0 + (xi - 1.0) * (gamma - 1.0)),
            (g, gamma - 1.0),
            (h, -xi * (gamma - 1.0)),
        ],
    )
    return _assemble(
        TheoremId.REL_ESCORT,
        triple,
        {"h": h, "xi": xi},
        div - rel,
        cross,
        e1 + e2 + e3,
    )


def check_bip_down(
    f: Density,
    g: Density,
    alpha: float,
    beta: float,
    a: float,
    b: float,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> CheckReport:
    """Fisher-type bound: the (a, b)-weighted derivative functional of f
    plus divergence against the matching cross-Fisher form, in log scale."""
    if b == 0.0 or a == 2.0 * b:
        raise DegenerateParameters("need b != 0 and a != 2b")
    triple = solve_triple(alpha, beta)
    support = _common_support(f, g)
    _require_decreasing(f)
    gamma = triple.gamma
    fisher, e1 = _log_term(
        support,
        1.0 - alpha,
        config,
        pdf=[(f, 1.0 + a * (alpha - 1.0))],
        deriv=[(f, b * (1.0 - alpha))],
    )
    div, e2 = _divergence_term(f, g, beta, support, config)
    cross, e3 = _log_term(
        support,
        1.0 - gamma,
        config,
        pdf=[(f, 1.0 + (1.0 - a) * (1.0 - gamma)), (g, gamma - 1.0)],
        deriv=[(f, b * (1.0 - gamma))],
    )
    return _assemble(
        TheoremId.BIP_DOWN, triple, {"a": a, "b": b}, fisher + div, cross, e1 + e2 + e3
    )


def check_down_fisher(
    f: Density,
    g: Density,
    alpha: float,
    beta: float,
    a: float,
    b: float,
    xi: float,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> CheckReport:
    """Curvature-weighted Fisher bound one level below the (a, b) one.

    Requires the sampled sup of f f''/f'^2 to stay below xi; whether g must
    also be decreasing is unsettled, so a non-decreasing g only warns.
    """
    if b == 0.0 or a == 2.0 * b:
        raise DegenerateParameters("need b != 0 and a != 2b")
    triple = solve_triple(alpha, beta)
    support = _common_support(f, g)
    _require_decreasing(f)
    _require_curvature_below(f, xi)
    if not g.decreasing:
        warnings.warn(
            f"{g} is not decreasing; the bound is only stated for decreasing pairs",
            RuntimeWarning,
            stacklevel=2,
        )
    gamma = triple.gamma
    p = (1.0 - alpha) * b
    lam = xi * (2.0 - a / b)
    fisher, e1 = _log_term(
        support,
        1.0 - alpha,
        config,
        pdf=[(f, 1.0 + p * (lam - 2.0))],
        deriv=[(f, (1.0 - alpha) * (a - b))],
        curvature=[(f, xi, p)],
    )
    div, e2 = _divergence_term(f, g, beta, support, config)
    f_exp, g_exp, d_exp, c_exp = _cross_down_exponents(a, b, 1.0 - gamma, xi)
    cross, e3 = _log_term(
        support,
        1.0 - gamma,
        config,
        pdf=[(f, f_exp), (g, g_exp)],
        deriv=[(f, d_exp)],
        curvature=[(f, xi, c_exp)],
    )
    return _assemble(
        TheoremId.DOWN_FISHER,
        triple,
        {"a": a, "b": b, "xi": xi},
        fisher + div,
        cross,
        e1 + e2 + e3,
    )


def check_up(
    f: Density,
    g: Density,
    alpha: float,
    beta: float,
    a: float,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> CheckReport:
    """Moment bound one level above: |x|-moments for a != 2, exponential
    moments for a = 2 (that case needs no positive support)."""
    triple = solve_triple(alpha, beta)
    support = _common_support(f, g)
    if a != 2.0 and support.lo < 0.0:
        raise PreconditionViolated("power moments need a support within [0, inf)")
    gamma = triple.gamma
    div, e2 = _divergence_term(f, g, beta, support, config)
    if a == 2.0:
        moment, e1 = _log_term(
            support, 1.0 - alpha, config, pdf=[(f, 1.0)], exp_rate=1.0 - alpha
        )
        cross, e3 = _log_term(
            support,
            1.0 - gamma,
            config,
            pdf=[(f, 2.0 - gamma), (g, gamma - 1.0)],
            exp_rate=1.0 - gamma,
        )
        return _assemble(
            TheoremId.UP_EXP, triple, {}, moment + div, cross, e1 + e2 + e3
        )
    moment, e1 = _log_term(
        support, 1.0 - alpha, config, pdf=[(f, 1.0)], abs_x=(alpha - 1.0) / (2.0 - a)
    )
    cross, e3 = _log_term(
        support,
        1.0 - gamma,
        config,
        pdf=[(f, 2.0 - gamma), (g, gamma - 1.0)],
        abs_x=(gamma - 1.0) / (2.0 - a),
    )
    return _assemble(
        TheoremId.UP, triple, {"a": a}, moment + div, cross, e1 + e2 + e3
    )


def check_upper_mom(
    f: Density,
    g: Density,
    alpha: float,
    beta: float,
    a: float,
    b: float,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> CheckReport:
    """Two levels above: moments of the upper-tail weight Y_b, with the
    cumulative table built once and shared by both sides."""
    if a == 2.0 or b == 2.0:
        raise DegenerateParameters("tail index 2 has no power-weight form")
    triple = solve_triple(alpha, beta)
    support = _common_support(f, g)
    if support.lo < 0.0:
        raise PreconditionViolated("upper moments need a support within [0, inf)")
    gamma = triple.gamma
    table = tail_table(f, b, config)
    lhs_m = upper_moment(f, (alpha - 1.0) / (2.0 - a), b, config, table=table)
    rhs_m = cross_upper_moment(
        f, g, (gamma - 1.0) / (2.0 - a), gamma - 1.0, b, config, table=table
    )
    div, e2 = _divergence_term(f, g, beta, support, config)
    lhs = lhs_m.log_M / (1.0 - alpha) + div
    rhs = rhs_m.log_M / (1.0 - gamma)
    err = (
        e2
        + abs(lhs_m.log_error / (1.0 - alpha))
        + abs(rhs_m.log_error / (1.0 - gamma))
    )
    return _assemble(TheoremId.UPPER_MOMENT, triple, {"a": a, "b": b}, lhs, rhs, err)


def run_check(
    theorem: TheoremId,
    f: Density,
    g: Density,
    alpha: float,
    beta: float,
    config: QuadratureConfig = DEFAULT_CONFIG,
    **extras: Any,
) -> CheckReport:
    """Uniform entry point for sweep drivers; extras keyed per theorem id."""
    _require_extras(theorem, extras)
    if theorem is TheoremId.RRR:
        return check_rrr(f, g, alpha, beta, config)
    if theorem is TheoremId.ESCORT:
        return check_escort(f, g, alpha, beta, extras["xi"], config)
    if theorem is TheoremId.REL_ESCORT:
        return check_rel_escort(f, g, extras["h"], alpha, beta, extras["xi"], config)
    if theorem is TheoremId.BIP_DOWN:
        return check_bip_down(f, g, alpha, beta, extras["a"], extras["b"], config)
    if theorem is TheoremId.DOWN_FISHER:
        return check_down_fisher(
            f, g, alpha, beta, extras["a"], extras["b"], extras["xi"], config
        )
    if theorem is TheoremId.UP:
        return check_up(f, g, alpha, beta, extras["a"], config)
    if theorem is TheoremId.UP_EXP:
        return check_up(f, g, alpha, beta, 2.0, config)
    if theorem is TheoremId.UPPER_MOMENT:
        return check_upper_mom(f, g, alpha, beta, extras["a"], extras["b"], config)
    raise ValueError(f"unknown theorem {theorem!r}")


# --- cross-divergence reductions --------------------------------------------------


def cross_divergence_identities(
    f: Density,
    g: Density,
    h: Density,
    a: float,
    b: float,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> IdentityResiduals:
    """Evaluate both sides of the seven reduction identities.

    Identities that constrain a parameter pin their own value (b = 0,
    a = 2, b = 1/(1-a)); the rest use the given (a, b).
    """
    if a == 1.0:
        raise DegenerateParameters("cross-divergence needs a != 1")
    if b == 0.0:
        raise DegenerateParameters("the reciprocal-weight identities need b != 0")
    _common_support(f, g, h)
    res: dict[str, float] = {}
    res["first_pair_collapse"] = abs(
        cross_divergence(f, f, h, a, b, config)
        + b * renyi_divergence(f, h, 1.0 + b * (a - 1.0), config)
    )
    res["reference_matches_second"] = abs(
        cross_divergence(f, h, h, a, b, config)
        - (1.0 - b) * renyi_divergence(f, h, 1.0 + (a - 1.0) * (b - 1.0), config)
    )
    res["reference_matches_first"] = abs(
        cross_divergence(f, g, f, a, b, config)
        - renyi_divergence(f, g, 2.0 - a, config)
    )
    res["zero_weight"] = abs(
        cross_divergence(f, g, h, a, 0.0, config)
        - renyi_divergence(f, g, 2.0 - a, config)
    )
    res["order_two_swap"] = abs(
        cross_divergence(f, g, h, 2.0, b, config)
        - b * cross_divergence(g, f, h, b + 1.0, 1.0, config)
    )
    res["reciprocal_weight"] = abs(
        cross_divergence(f, g, h, a, 1.0 / (1.0 - a), config)
        - cross_divergence(h, g, f, a, 1.0, config)
    )
    res["duality"] = abs(
        cross_divergence(f, g, h, a, b, config)
        + b * cross_divergence(f, h, g, 1.0 + b * (1.0 - a), 1.0 / b, config)
    )
    return IdentityResiduals(res)
