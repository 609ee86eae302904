"""Sharp-bound checkers, equality witnesses, and exponent adjudication."""

import dataclasses
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renyineq.densities import (
    Exponential,
    Gaussian,
    HalfGeneralizedNormal,
    Pareto,
    Rayleigh,
)
from renyineq.errors import (
    DegenerateParameters,
    DivergentIntegral,
    NotNormalizable,
    PreconditionViolated,
)
from renyineq.functionals import (
    cross_divergence,
    cross_down_fisher,
    cross_fisher,
    down_fisher,
    escort_cross_entropy,
    exp_cross_deviation,
    exp_moment,
    generalized_fisher,
    renyi_cross_entropy,
    renyi_divergence,
    renyi_entropy,
)
from renyineq.inequalities import (
    CheckReport,
    TheoremId,
    check_bip_down,
    check_down_fisher,
    check_escort,
    check_rel_escort,
    check_rrr,
    check_up,
    check_upper_mom,
    cross_divergence_identities,
    equality_witness,
    run_check,
    solve_beta,
    solve_triple,
    witness_exponents,
    witness_modifier,
)
from renyineq.quadrature import DEFAULT_CONFIG

GAP_2LOG54 = 2.0 * math.log(1.25)  # separation of the two witness modes at (2, 0)

coupled_orders = st.floats(0.15, 3.0).filter(lambda x: abs(x - 1.0) > 1e-3)


class TestSolveTriple:
    def test_completes_known_pairs(self):
        assert solve_triple(2.0, 0.0).gamma == pytest.approx(1.5, abs=1e-15)
        assert solve_triple(3.0, 2.0).gamma == pytest.approx(-1.0, abs=1e-15)
        assert solve_triple(0.5, 0.25).gamma == pytest.approx(-0.5, abs=1e-15)

    @pytest.mark.parametrize("alpha,beta", [(2.0, 2.0), (1.0, 0.5), (0.5, 1.0)])
    def test_degenerate_pairs_rejected(self, alpha, beta):
        with pytest.raises(DegenerateParameters):
            solve_triple(alpha, beta)

    def test_solve_beta_roundtrip(self):
        t = solve_triple(1.7, 0.4)
        back = solve_beta(1.7, t.gamma)
        assert back.beta == pytest.approx(0.4, abs=1e-12)
        assert back.gamma == t.gamma

    @given(alpha=coupled_orders, beta=coupled_orders)
    @settings(max_examples=200, deadline=None)
    def test_coupling_relation(self, alpha, beta):
        if abs(alpha - beta) < 1e-3:
            return
        t = solve_triple(alpha, beta)
        lhs = (alpha - t.beta) * (alpha - t.gamma)
        assert lhs == pytest.approx((alpha - 1.0) ** 2, rel=1e-9, abs=1e-12)


class TestWitnessExponents:
    def test_values_at_two_zero(self):
        e = witness_exponents(solve_triple(2.0, 0.0))
        assert e.k == pytest.approx(2.0, abs=1e-15)
        assert e.tilt == pytest.approx(1.0, abs=1e-15)
        assert e.paper_k == pytest.approx(0.5, abs=1e-15)
        assert e.paper_tilt == pytest.approx(-0.5, abs=1e-15)

    def test_mode_dispatch(self):
        e = witness_exponents(solve_triple(2.0, 0.0))
        assert e.tilt_for("corrected") == e.tilt
        assert e.tilt_for("paper") == e.paper_tilt
        with pytest.raises(ValueError):
            e.tilt_for("published")

    def test_derivative_exponents(self):
        e = witness_exponents(solve_triple(2.0, 0.0))
        assert e.derivative_exponents(3.0, 1.0) == pytest.approx((4.0, -1.0))
        assert e.derivative_exponents(3.0, 1.0, mode="paper") == pytest.approx((-0.5, 0.5))

    @given(alpha=coupled_orders, beta=coupled_orders)
    @settings(max_examples=200, deadline=None)
    def test_exponent_identities(self, alpha, beta):
        if abs(alpha - beta) < 1e-3:
            return
        t = solve_triple(alpha, beta)
        e = witness_exponents(t)
        # k (gamma - 1) = alpha - 1, tilt = k - 1, and the two modes are reciprocal
        assert e.k * (t.gamma - 1.0) == pytest.approx(alpha - 1.0, rel=1e-12, abs=1e-14)
        assert e.tilt == pytest.approx(e.k - 1.0, rel=1e-12, abs=1e-12)
        assert e.k * e.paper_k == pytest.approx(1.0, rel=1e-12)


class TestCheckRRR:
    def test_self_pair_gap_is_entropy_difference(self):
        f = Exponential(1.0)
        r = check_rrr(f, f, 2.0, 0.0)
        expected = renyi_entropy(f, 1.5) - renyi_entropy(f, 2.0)
        assert r.gap == pytest.approx(expected, rel=1e-9)
        assert r.gap >= 0.0

    def test_exponential_pair_closed_form(self):
        r = check_rrr(Exponential(1.0), Exponential(0.5), 2.0, 0.0)
        assert r.lhs == pytest.approx(math.log(2.0), abs=1e-10)
        assert r.rhs == pytest.approx(math.log(2.0) + GAP_2LOG54, abs=1e-10)
        assert r.gap == pytest.approx(GAP_2LOG54, abs=1e-10)
        assert r.direction == "normal"
        assert r.passed

    def test_sides_match_public_functionals(self):
        f, g = Exponential(1.0), Exponential(0.5)
        r = check_rrr(f, g, 1.7, 0.4)
        t = solve_triple(1.7, 0.4)
        assert r.lhs == pytest.approx(
            renyi_entropy(f, 1.7) + renyi_divergence(f, g, 0.4), rel=1e-10
        )
        assert r.rhs == pytest.approx(renyi_cross_entropy(f, g, t.gamma), rel=1e-10)

    def test_witness_closes_gap(self):
        f = Exponential(1.0)
        w = equality_witness(TheoremId.RRR, f, 2.0, 0.0)
        assert abs(check_rrr(f, w, 2.0, 0.0).gap) <= 1e-8

    def test_witness_closes_gap_low_orders(self):
        f = Exponential(1.0)
        w = equality_witness(TheoremId.RRR, f, 0.5, 0.25)
        r = check_rrr(f, w, 0.5, 0.25)
        assert abs(r.gap) <= 1e-8
        assert r.lhs == pytest.approx((2.0 / 3.0) * math.log(2.0) + math.log(3.0), abs=1e-8)

    def test_adjudication_between_modes(self):
        # the corrected exponent closes the gap; the printed one leaves 2 log(5/4)
        f = Exponential(1.0)
        corrected = equality_witness(TheoremId.RRR, f, 2.0, 0.0, mode="corrected")
        paper = equality_witness(TheoremId.RRR, f, 2.0, 0.0, mode="paper")
        assert abs(check_rrr(f, corrected, 2.0, 0.0).gap) <= 1e-8
        assert check_rrr(f, paper, 2.0, 0.0).gap == pytest.approx(GAP_2LOG54, abs=1e-6)


class TestEqualityWitness:
    def test_rrr_witness_is_squared_escort(self):
        w = equality_witness(TheoremId.RRR, Exponential(1.0), 2.0, 0.0)
        xs = np.linspace(0.1, 4.0, 9)
        assert w.pdf(xs) == pytest.approx(Exponential(2.0).pdf(xs), rel=1e-9)

    def test_rrr_witness_low_orders(self):
        w = equality_witness(TheoremId.RRR, Exponential(1.0), 0.5, 0.25)
        xs = np.linspace(0.1, 20.0, 9)
        assert w.pdf(xs) == pytest.approx(Exponential(1.0 / 3.0).pdf(xs), rel=1e-9)

    def test_paper_mode_rrr_witness(self):
        w = equality_witness(TheoremId.RRR, Exponential(1.0), 2.0, 0.0, mode="paper")
        xs = np.linspace(0.1, 8.0, 9)
        assert w.pdf(xs) == pytest.approx(Exponential(0.5).pdf(xs), rel=1e-9)

    def test_up_exp_witness(self):
        w = equality_witness(TheoremId.UP_EXP, Exponential(1.0), 2.0, 0.0)
        xs = np.linspace(0.1, 4.0, 9)
        assert w.pdf(xs) == pytest.approx(Exponential(2.0).pdf(xs), rel=1e-9)

    def test_up_witness_is_pareto(self):
        w = equality_witness(TheoremId.UP, Pareto(1.0, 3.0), 2.0, 0.0, a=3.0)
        xs = np.linspace(1.2, 30.0, 9)
        assert w.pdf(xs) == pytest.approx(Pareto(1.0, 4.0).pdf(xs), rel=1e-8)

    def test_upper_moment_witness_shape(self):
        # tail weight for b=3 is (1+x)e^{-x}; tilt -2/3 spreads it by -4/9
        f = Exponential(1.0)
        w = equality_witness(TheoremId.UPPER_MOMENT, f, 0.5, 0.25, a=0.5, b=3.0)
        xs = np.linspace(0.2, 5.0, 9)
        shape = f.pdf(xs) * ((1.0 + xs) * np.exp(-xs)) ** (-4.0 / 9.0)
        ratio = w.pdf(xs) / shape
        assert float(np.ptp(ratio)) <= 1e-9 * float(np.mean(ratio))

    def test_non_normalizable_tilt(self):
        with pytest.raises(NotNormalizable):
            equality_witness(TheoremId.RRR, Pareto(1.0, 3.0), 2.0, 0.0, tilt=-0.8)

    def test_rel_escort_heavy_reference_not_normalizable(self):
        # f/h grows like e^{+x}, so the corrected tilt makes g constant
        with pytest.raises(NotNormalizable):
            equality_witness(
                TheoremId.REL_ESCORT, Exponential(1.0), 2.0, 0.0,
                h=Exponential(2.0), xi=1.0,
            )

    def test_missing_extras_rejected(self):
        with pytest.raises(TypeError):
            equality_witness(TheoremId.ESCORT, Exponential(1.0), 2.0, 0.0)
        with pytest.raises(TypeError):
            equality_witness(TheoremId.RRR, Exponential(1.0), 2.0, 0.0, xi=1.0)

    def test_bad_mode_rejected(self):
        with pytest.raises(ValueError):
            equality_witness(TheoremId.RRR, Exponential(1.0), 2.0, 0.0, mode="printed")

    def test_up_weight_two_routes_to_exp_branch(self):
        with pytest.raises(DegenerateParameters):
            witness_modifier(TheoremId.UP, 2.0, 0.0, a=2.0)
        with pytest.raises(DegenerateParameters):
            witness_modifier(TheoremId.UPPER_MOMENT, 2.0, 0.0, a=2.0, b=3.0)

    def test_down_fisher_modifier_is_printable_formula(self):
        mod = witness_modifier(TheoremId.DOWN_FISHER, 2.0, 0.0, a=3.0, b=1.0, xi=2.0)
        assert mod.power_base == pytest.approx(5.0)
        assert mod.power_deriv == pytest.approx(-2.0)
        assert mod.power_curv == pytest.approx(-1.0)
        assert mod.curv_offset == pytest.approx(2.0)
        assert "power_curv" in repr(mod)


class TestCheckEscort:
    def test_xi_one_collapses_to_rrr(self):
        f, g = Exponential(1.0), Exponential(0.5)
        for alpha, beta in [(2.0, 0.0), (1.7, 0.4), (0.5, 0.25)]:
            r0 = check_rrr(f, g, alpha, beta)
            r1 = check_escort(f, g, alpha, beta, 1.0)
            assert abs(r1.lhs - r0.lhs) <= 1e-10
            assert abs(r1.rhs - r0.rhs) <= 1e-10
            assert abs(r1.gap - r0.gap) <= 1e-10
            assert abs(r1.quad_error - r0.quad_error) <= 1e-10
            assert r1.direction == r0.direction
            assert r1.passed == r0.passed

    def test_xi_zero_drops_entropy_term(self):
        f, g = Exponential(1.0), Exponential(0.5)
        r = check_escort(f, g, 2.0, 0.0, 0.0)
        t = solve_triple(2.0, 0.0)
        assert r.lhs == pytest.approx(renyi_divergence(f, g, 0.0), abs=1e-10)
        assert r.rhs == pytest.approx(escort_cross_entropy(f, g, t.gamma, 0.0), rel=1e-10)
        assert r.passed

    def test_sides_match_public_functionals(self):
        f, g = Exponential(1.0), Exponential(0.5)
        xi = 2.0
        r = check_escort(f, g, 2.0, 0.0, xi)
        lhs = xi * renyi_entropy(f, 1.0 + (2.0 - 1.0) * xi) + renyi_divergence(f, g, 0.0)
        assert r.lhs == pytest.approx(lhs, rel=1e-10)
        assert r.rhs == pytest.approx(escort_cross_entropy(f, g, 1.5, xi), rel=1e-10)

    def test_witness_closes_gap(self):
        f = Exponential(1.0)
        w = equality_witness(TheoremId.ESCORT, f, 2.0, 0.0, xi=2.0)
        r = check_escort(f, w, 2.0, 0.0, 2.0)
        assert abs(r.gap) <= 1e-7
        assert r.lhs == pytest.approx(math.log(3.0), abs=1e-8)

    @pytest.mark.parametrize("xi", [0.0, 0.5, 1.0, 2.0])
    def test_exponential_sweep(self, xi):
        r = check_escort(Exponential(1.0), Exponential(0.7), 1.6, 0.3, xi)
        assert r.passed


class TestCheckRelEscort:
    def test_reference_equals_g_recovers_order_monotonicity(self):
        # rhs vanishes, so the gap is D_alpha - D_beta >= 0 for alpha > beta
        f, h = Exponential(1.0), Exponential(1.5)
        alpha = 2.0
        last = None
        for beta in [0.0, 0.25, 0.5, 0.75]:
            r = check_rel_escort(f, h, h, alpha, beta, 1.0)
            assert abs(r.rhs) <= 1e-9
            expected = renyi_divergence(f, h, alpha) - renyi_divergence(f, h, beta)
            assert r.gap == pytest.approx(expected, rel=1e-8, abs=1e-10)
            assert r.gap >= 0.0
            if last is not None:
                # divergence grows with the order, so the gap shrinks in beta
                assert r.gap <= last + 1e-12
            last = r.gap

    def test_reference_equals_f_reduces_to_divergence_bound(self):
        f, g = Exponential(1.0), Exponential(0.5)
        for alpha, beta in [(2.0, 0.0), (2.0, 0.5), (3.0, 2.0), (0.5, 0.25)]:
            t = solve_triple(alpha, beta)
            r = check_rel_escort(f, g, f, alpha, beta, 1.0)
            assert r.lhs == pytest.approx(renyi_divergence(f, g, beta), rel=1e-9, abs=1e-12)
            assert r.rhs == pytest.approx(
                renyi_divergence(f, g, 2.0 - t.gamma), rel=1e-9, abs=1e-12
            )
            assert r.passed

    def test_sides_match_public_functionals(self):
        f, g, h = Exponential(1.0), Exponential(0.5), Exponential(0.8)
        xi = 0.5
        r = check_rel_escort(f, g, h, 2.0, 0.0, xi)
        lhs = renyi_divergence(f, g, 0.0) - xi * renyi_divergence(f, h, 1.0 + xi)
        assert r.lhs == pytest.approx(lhs, rel=1e-9, abs=1e-12)
        assert r.rhs == pytest.approx(cross_divergence(f, g, h, 1.5, xi), rel=1e-9)

    def test_witness_closes_gap(self):
        f, h = Exponential(1.0), Exponential(0.5)
        w = equality_witness(TheoremId.REL_ESCORT, f, 2.0, 0.0, h=h, xi=1.0)
        r = check_rel_escort(f, w, h, 2.0, 0.0, 1.0)
        assert abs(r.gap) <= 1e-7
        assert r.lhs == pytest.approx(-math.log(4.0 / 3.0), abs=1e-8)
        xs = np.linspace(0.1, 5.0, 9)
        assert w.pdf(xs) == pytest.approx(Exponential(1.5).pdf(xs), rel=1e-9)

    def test_divergent_combination_raises(self):
        with pytest.raises(DivergentIntegral):
            check_rel_escort(
                Exponential(1.0), Exponential(2.5), Exponential(0.5), 3.0, 2.0, 1.0
            )


class TestCheckBipDown:
    def test_exponential_grid_closed_form(self):
        # at (a,b)=(1,1), (2,0) the gap is 2 log((1+mu)/2) - log(mu) >= 0
        f = Exponential(1.0)
        for mu in [0.2, 0.5, 1.0, 2.0, 5.0]:
            r = check_bip_down(f, Exponential(mu), 2.0, 0.0, 1.0, 1.0)
            expected = 2.0 * math.log((1.0 + mu) / 2.0) - math.log(mu)
            assert r.gap == pytest.approx(expected, abs=1e-8)
            assert r.passed

    def test_sides_match_public_functionals(self):
        f, g = Exponential(1.0), Exponential(0.5)
        a, b = 3.0, 1.0
        r = check_bip_down(f, g, 2.0, 0.0, a, b)
        fisher = generalized_fisher(f, (1.0 - 2.0) * b, 2.0 - a / b)
        assert r.lhs == pytest.approx(
            fisher.log_F / (1.0 - 2.0) + renyi_divergence(f, g, 0.0), rel=1e-9
        )
        assert r.rhs == pytest.approx(
            math.log(cross_fisher(f, g, 2.0 - a, b, 1.0 - 1.5)), rel=1e-9
        )

    def test_witness_closes_gap(self):
        f = Exponential(1.0)
        w = equality_witness(TheoremId.BIP_DOWN, f, 2.0, 0.0, a=3.0, b=1.0)
        r = check_bip_down(f, w, 2.0, 0.0, 3.0, 1.0)
        assert abs(r.gap) <= 1e-7
        assert r.lhs == pytest.approx(math.log(3.0), abs=1e-8)
        xs = np.linspace(0.1, 4.0, 9)
        assert w.pdf(xs) == pytest.approx(Exponential(3.0).pdf(xs), rel=1e-9)

    def test_half_gaussian_rayleigh_type_witness(self):
        # f ~ e^{-x^2}: tilt -2/3 at (0,1) gives g ~ x^{2/3} e^{-(5/3)x^2},
        # a Rayleigh-like profile but with the corrected power of x
        f = HalfGeneralizedNormal(2.0, 1.0)
        w = equality_witness(TheoremId.BIP_DOWN, f, 0.5, 0.25, a=0.0, b=1.0)
        r = check_bip_down(f, w, 0.5, 0.25, 0.0, 1.0)
        assert abs(r.gap) <= 1e-6
        xs = np.linspace(0.3, 2.5, 9)
        shape = xs ** (2.0 / 3.0) * np.exp(-(5.0 / 3.0) * xs**2)
        ratio = w.pdf(xs) / shape
        assert float(np.ptp(ratio)) <= 1e-9 * float(np.mean(ratio))

    def test_increasing_density_rejected(self):
        g = Gaussian(0.0, 1.0)
        with pytest.raises(PreconditionViolated):
            check_bip_down(g, g, 2.0, 0.0, 1.0, 1.0)

    @pytest.mark.parametrize("a,b", [(1.0, 0.0), (2.0, 1.0)])
    def test_degenerate_weights_rejected(self, a, b):
        f = Exponential(1.0)
        with pytest.raises(DegenerateParameters):
            check_bip_down(f, f, 2.0, 0.0, a, b)


class TestCheckDownFisher:
    @pytest.mark.parametrize(
        "alpha,beta,a,b", [(2.0, 0.0, 3.0, 1.0), (1.5, 0.5, 3.0, 1.0), (0.5, 0.25, 1.0, 1.0)]
    )
    def test_exponential_grid(self, alpha, beta, a, b):
        r = check_down_fisher(Exponential(1.0), Exponential(1.2), alpha, beta, a, b, 2.0)
        assert r.passed

    def test_sides_match_public_functionals(self):
        f, g = Exponential(1.0), Exponential(0.5)
        a, b, xi = 3.0, 1.0, 2.0
        r = check_down_fisher(f, g, 2.0, 0.0, a, b, xi)
        p, q = (1.0 - 2.0) * b, (1.0 - 2.0) * (a - b)
        lhs = math.log(down_fisher(f, p, q, xi * (2.0 - a / b))) / (
            1.0 - 2.0
        ) + renyi_divergence(f, g, 0.0)
        assert r.lhs == pytest.approx(lhs, rel=1e-9)
        rhs = math.log(cross_down_fisher(f, g, a, b, 1.0 - 1.5, xi)) / (1.0 - 1.5)
        assert r.rhs == pytest.approx(rhs, rel=1e-9)

    def test_witness_closes_gap(self):
        f = Exponential(1.0)
        w = equality_witness(TheoremId.DOWN_FISHER, f, 2.0, 0.0, a=3.0, b=1.0, xi=2.0)
        r = check_down_fisher(f, w, 2.0, 0.0, 3.0, 1.0, 2.0)
        assert abs(r.gap) <= 1e-6
        xs = np.linspace(0.1, 4.0, 9)
        assert w.pdf(xs) == pytest.approx(Exponential(3.0).pdf(xs), rel=1e-9)

    @pytest.mark.parametrize("xi", [1.0, 0.5])
    def test_curvature_bound_enforced(self, xi):
        # exponential curvature ratio is identically 1, so xi <= 1 fails
        with pytest.raises(PreconditionViolated):
            check_down_fisher(Exponential(1.0), Exponential(0.5), 2.0, 0.0, 3.0, 1.0, xi)

    def test_non_decreasing_second_density_warns(self):
        with pytest.warns(RuntimeWarning):
            r = check_down_fisher(Exponential(1.0), Rayleigh(1.0), 2.0, 0.0, 3.0, 1.0, 2.0)
        assert r.passed


class TestCheckUp:
    def test_exp_branch_closed_form(self):
        f = Exponential(1.0)
        w = equality_witness(TheoremId.UP_EXP, f, 2.0, 0.0)
        r = check_up(f, w, 2.0, 0.0, 2.0)
        assert r.theorem is TheoremId.UP_EXP
        assert r.extras == {}
        assert abs(r.gap) <= 1e-8
        assert r.lhs == pytest.approx(math.log(2.0), abs=1e-9)

    def test_exp_branch_matches_public_functionals(self):
        f, g = Exponential(1.0), Exponential(0.5)
        r = check_up(f, g, 2.0, 0.0, 2.0)
        lhs = math.log(exp_moment(f, 1.0 - 2.0)) / (1.0 - 2.0) + renyi_divergence(f, g, 0.0)
        assert r.lhs == pytest.approx(lhs, rel=1e-10)
        assert r.rhs == pytest.approx(math.log(exp_cross_deviation(f, g, 1.5)), rel=1e-10)

    def test_power_branch_pareto_witness(self):
        f = Pareto(1.0, 3.0)
        w = equality_witness(TheoremId.UP, f, 2.0, 0.0, a=3.0)
        r = check_up(f, w, 2.0, 0.0, 3.0)
        assert r.theorem is TheoremId.UP
        assert abs(r.gap) <= 1e-6
        assert r.lhs == pytest.approx(math.log(4.0 / 3.0), abs=1e-8)

    def test_self_pair_moment_comparison(self):
        assert check_up(Pareto(1.0, 3.0), Pareto(1.0, 3.0), 2.0, 0.0, 3.0).passed
        assert check_up(Exponential(1.0), Exponential(1.0), 0.5, 0.25, 3.0).passed

    def test_negative_support_rejected(self):
        g = Gaussian(0.0, 1.0)
        with pytest.raises(PreconditionViolated):
            check_up(g, g, 2.0, 0.0, 3.0)

    def test_exp_branch_allows_negative_support(self):
        g = Gaussian(0.0, 1.0)
        assert check_up(g, g, 2.0, 0.0, 2.0).passed


class TestCheckUpperMom:
    def test_against_direct_quadrature(self):
        # independent oracle: scipy fixed-order quadrature on the closed
        # tail weight (1+x)e^{-x} of Exp(1) at b=3
        from scipy.integrate import quad

        f = Exponential(1.0)
        r = check_upper_mom(f, f, 0.5, 0.25, 3.0, 3.0)
        tail = lambda x: (1.0 + x) * math.exp(-x)
        m_lhs = quad(lambda x: math.exp(-x) * tail(x) ** 0.5, 0.0, np.inf)[0]
        m_rhs = quad(lambda x: math.exp(-x) * tail(x) ** 1.5, 0.0, np.inf)[0]
        assert r.lhs == pytest.approx(math.log(m_lhs) / 0.5, rel=1e-8)
        assert r.rhs == pytest.approx(math.log(m_rhs) / 1.5, rel=1e-8)
        assert r.passed

    def test_witness_closes_gap(self):
        f = Exponential(1.0)
        w = equality_witness(TheoremId.UPPER_MOMENT, f, 0.5, 0.25, a=0.5, b=3.0)
        r = check_upper_mom(f, w, 0.5, 0.25, 0.5, 3.0)
        assert abs(r.gap) <= 1e-6

    @pytest.mark.parametrize("a,b", [(2.0, 3.0), (3.0, 2.0)])
    def test_degenerate_indices_rejected(self, a, b):
        f = Exponential(1.0)
        with pytest.raises(DegenerateParameters):
            check_upper_mom(f, f, 2.0, 0.0, a, b)

    def test_negative_support_rejected(self):
        g = Gaussian(0.0, 1.0)
        with pytest.raises(PreconditionViolated):
            check_upper_mom(g, g, 2.0, 0.0, 3.0, 3.0)


REVERSED_CASES = [
    (TheoremId.RRR, {}),
    (TheoremId.ESCORT, {"xi": 0.5}),
    (TheoremId.REL_ESCORT, {"h": Exponential(0.8), "xi": 0.5}),
    (TheoremId.BIP_DOWN, {"a": 1.0, "b": 1.0}),
    (TheoremId.DOWN_FISHER, {"a": 1.0, "b": 1.0, "xi": 2.0}),
    (TheoremId.UP, {"a": 3.0}),
    (TheoremId.UP_EXP, {}),
    (TheoremId.UPPER_MOMENT, {"a": 0.5, "b": 3.0}),
]


class TestDirectionLaw:
    @pytest.mark.parametrize("theorem,extras", REVERSED_CASES, ids=lambda v: str(v))
    def test_both_orientations_hold(self, theorem, extras):
        f, g = Exponential(1.0), Exponential(1.2)
        fwd = run_check(theorem, f, g, 1.5, 0.5, **extras)
        rev = run_check(theorem, f, g, 0.5, 1.5, **extras)
        assert fwd.direction == "normal"
        assert rev.direction == "reversed"
        assert fwd.gap >= -1e-7 and fwd.passed
        assert rev.gap >= -1e-7 and rev.passed


WITNESS_CASES = [
    (TheoremId.RRR, Exponential(1.0), 2.0, 0.0, {}),
    (TheoremId.ESCORT, Exponential(1.0), 2.0, 0.0, {"xi": 2.0}),
    (TheoremId.REL_ESCORT, Exponential(1.0), 2.0, 0.0, {"h": Exponential(0.5), "xi": 1.0}),
    (TheoremId.BIP_DOWN, Exponential(1.0), 2.0, 0.0, {"a": 3.0, "b": 1.0}),
    (TheoremId.DOWN_FISHER, Exponential(1.0), 2.0, 0.0, {"a": 3.0, "b": 1.0, "xi": 2.0}),
    (TheoremId.UP, Pareto(1.0, 3.0), 2.0, 0.0, {"a": 3.0}),
    (TheoremId.UP_EXP, Exponential(1.0), 2.0, 0.0, {}),
    (TheoremId.UPPER_MOMENT, Exponential(1.0), 0.5, 0.25, {"a": 0.5, "b": 3.0}),
]


class TestWitnessOptimality:
    @pytest.mark.parametrize("theorem,f,alpha,beta,extras", WITNESS_CASES,
                             ids=[c[0].value for c in WITNESS_CASES])
    def test_gap_is_locally_minimal_in_tilt(self, theorem, f, alpha, beta, extras):
        tilt = witness_exponents(solve_triple(alpha, beta)).tilt
        gaps = {}
        for scale in (1.0, 0.95, 1.05):
            w = equality_witness(theorem, f, alpha, beta, tilt=tilt * scale, **extras)
            gaps[scale] = abs(run_check(theorem, f, w, alpha, beta, **extras).gap)
        assert gaps[1.0] <= 1e-6
        assert gaps[0.95] > gaps[1.0]
        assert gaps[1.05] > gaps[1.0]


class TestNumericalStability:
    @pytest.mark.parametrize("theorem,f,alpha,beta,extras", WITNESS_CASES,
                             ids=[c[0].value for c in WITNESS_CASES])
    def test_gap_insensitive_to_tolerance(self, theorem, f, alpha, beta, extras):
        g = equality_witness(theorem, f, alpha, beta, **extras)
        coarse = dataclasses.replace(DEFAULT_CONFIG, rel_tol=1e-8)
        fine = dataclasses.replace(DEFAULT_CONFIG, rel_tol=1e-10)
        r1 = run_check(theorem, f, g, alpha, beta, config=coarse, **extras)
        r2 = run_check(theorem, f, g, alpha, beta, config=fine, **extras)
        assert abs(r1.gap - r2.gap) < 1e-6


class TestRunCheck:
    def test_dispatch_matches_direct_calls(self):
        f, g = Exponential(1.0), Exponential(0.5)
        assert run_check(TheoremId.RRR, f, g, 2.0, 0.0).gap == check_rrr(f, g, 2.0, 0.0).gap
        assert (
            run_check(TheoremId.ESCORT, f, g, 2.0, 0.0, xi=2.0).gap
            == check_escort(f, g, 2.0, 0.0, 2.0).gap
        )
        r = run_check(TheoremId.UP_EXP, f, g, 2.0, 0.0)
        assert r.theorem is TheoremId.UP_EXP
        assert r.gap == check_up(f, g, 2.0, 0.0, 2.0).gap

    def test_extras_validated(self):
        f, g = Exponential(1.0), Exponential(0.5)
        with pytest.raises(TypeError):
            run_check(TheoremId.REL_ESCORT, f, g, 2.0, 0.0, xi=1.0)
        with pytest.raises(TypeError):
            run_check(TheoremId.RRR, f, g, 2.0, 0.0, a=3.0)


class TestCheckReportRecord:
    def test_record_schema(self):
        f, g, h = Exponential(1.0), Exponential(0.5), Exponential(0.8)
        rec = check_rel_escort(f, g, h, 2.0, 0.0, 0.5).to_record()
        assert list(rec) == [
            "theorem", "alpha", "beta", "gamma", "extras", "lhs", "rhs",
            "gap", "direction", "quad_error", "pass", "warning",
        ]
        assert rec["theorem"] == "rel_escort"
        assert rec["extras"] == {"h": "exponential:rate=0.8", "xi": 0.5}
        assert rec["pass"] is True
        assert isinstance(rec["warning"], bool)

    def test_conditioning_warning_near_unit_order(self):
        r = check_rrr(Exponential(1.0), Exponential(0.8), 1.0 + 5e-7, 0.5)
        assert r.conditioning_warning
        assert r.to_record()["warning"] is True

    def test_conditioning_warning_near_equal_orders(self):
        assert solve_triple(2.0, 2.0 - 1e-7).conditioning_warning
        assert not solve_triple(2.0, 0.5).conditioning_warning


class TestCrossDivergenceIdentities:
    def test_exponential_battery(self):
        res = cross_divergence_identities(
            Exponential(1.0), Exponential(2.0), Exponential(0.5), 1.7, 0.6
        )
        assert set(res.residuals) == {
            "first_pair_collapse", "reference_matches_second", "reference_matches_first",
            "zero_weight", "order_two_swap", "reciprocal_weight", "duality",
        }
        assert res.max_residual <= 1e-7

    def test_unit_second_weight_zero_identity(self):
        # at b=1 the reference-matching identity degenerates to a pure zero
        h = Exponential(0.5)
        res = cross_divergence_identities(Exponential(1.0), h, h, 1.7, 1.0)
        assert res.residuals["reference_matches_second"] <= 1e-9

    def test_seeded_battery(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            f = Exponential(float(rng.uniform(1.0, 1.25)))
            g = Exponential(float(rng.uniform(1.0, 1.25)))
            h = Exponential(0.8)
            a = float(rng.uniform(1.3, 1.8))
            b = float(rng.uniform(0.4, 0.9))
            assert cross_divergence_identities(f, g, h, a, b).max_residual <= 1e-7

    def test_degenerate_weights_rejected(self):
        f, g, h = Exponential(1.0), Exponential(2.0), Exponential(0.5)
        with pytest.raises(DegenerateParameters):
            cross_divergence_identities(f, g, h, 1.0, 0.5)
        with pytest.raises(DegenerateParameters):
            cross_divergence_identities(f, g, h, 1.5, 0.0)
