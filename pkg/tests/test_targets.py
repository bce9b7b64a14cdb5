"""Tests for target processes, terminal constraints, and tracking signals."""

import numpy as np
import pytest

import impact_hedge as ih
from impact_hedge import (
    AlignmentError,
    BachelierAsianSpec,
    Constant,
    DomainError,
    ModelParams,
    PolynomialShape,
    PowerSingularity,
    TargetProcess,
    TargetSegment,
    TerminalConstraint,
    TimeGrid,
    asian_delta,
    asian_delta_post_fixing,
    asian_delta_terminal,
    asian_signal,
    asian_signal_mc,
    asian_signal_paths,
    deterministic_signal_values,
    kernel_constrained_mass,
    kernel_unconstrained_mass,
    signal_constrained,
    signal_from_paths,
    signal_quadratic_variation,
    signal_unconstrained,
    simulate_paths,
    target_from_json,
    target_to_json,
    terminal_weight,
)

from _oracles import (
    ASIAN_SIGNAL_0,
    ASIAN_SIGNAL_C_0,
    FIG2_SIGNAL_0,
    FIG2_SIGNAL_C_0,
    FIG2_SIGNAL_QTR,
    MASS_C_HALF,
    POLY_U2_SIGNAL_0,
    SECH_1,
    TWO_LEVEL_SIGNAL_0,
    TWO_LEVEL_SIGNAL_C_0,
)
from conftest import grid_with_half


class TestShapes:
    def test_constant_value(self):
        c = Constant(level=2.5)
        assert c.value(0.3) == 2.5
        np.testing.assert_array_equal(c.value([0.0, 1.0]), [2.5, 2.5])

    def test_polynomial_value(self):
        p = PolynomialShape(coefficients=(1.0, -2.0, 3.0))
        assert p.value(0.5) == pytest.approx(1.0 - 1.0 + 0.75, rel=1e-15)
        np.testing.assert_allclose(p.value([0.0, 1.0]), [1.0, 2.0], rtol=1e-15)

    def test_polynomial_needs_coefficients(self):
        with pytest.raises(ValueError, match="at least one coefficient"):
            PolynomialShape(coefficients=())

    def test_singularity_exponent_range(self):
        for bad in (0.0, 0.5, -0.1, 0.9):
            with pytest.raises(ValueError, match=r"exponent must lie in \(0, 1/2\)"):
                PowerSingularity(center=0.5, exponent=bad)

    def test_singularity_scale_and_signs(self):
        with pytest.raises(ValueError, match="scale must be > 0"):
            PowerSingularity(center=0.5, scale=0.0)
        with pytest.raises(ValueError, match=r"signs must be \+1 or -1"):
            PowerSingularity(center=0.5, left_sign=0.5)

    def test_singularity_value_sides(self):
        s = PowerSingularity(center=0.5, exponent=0.25)
        assert s.value(0.25) == pytest.approx(-(0.25 ** -0.25), rel=1e-15)
        assert s.value(0.75) == pytest.approx(0.25 ** -0.25, rel=1e-15)
        assert np.isinf(s.value(0.5))


class TestTargetProcess:
    def test_segment_validation(self):
        with pytest.raises(ValueError, match="stop > start"):
            TargetSegment(start=0.5, stop=0.5, shape=Constant(1.0))
        with pytest.raises(ValueError, match="center must lie inside"):
            TargetSegment(
                start=0.0, stop=0.3, shape=PowerSingularity(center=0.5)
            )

    def test_deterministic_validation(self):
        with pytest.raises(ValueError, match="at least one segment"):
            TargetProcess.deterministic([])
        with pytest.raises(ValueError, match="start at t = 0"):
            TargetProcess.deterministic(
                [TargetSegment(0.1, 1.0, Constant(1.0))]
            )
        with pytest.raises(ValueError, match="tile the horizon"):
            TargetProcess.deterministic(
                [
                    TargetSegment(0.0, 0.4, Constant(1.0)),
                    TargetSegment(0.5, 1.0, Constant(2.0)),
                ]
            )

    def test_horizon(self, two_level_target, asian_spec):
        assert two_level_target.horizon == 1.0
        assert TargetProcess.from_asian(asian_spec).horizon == 1.0

    def test_required_grid_times(self, two_level_target, singular_target,
                                 asian_spec):
        assert two_level_target.required_grid_times() == [0.5]
        assert singular_target.required_grid_times() == [0.5]
        assert TargetProcess.from_asian(asian_spec).required_grid_times() == [0.5]

    def test_value_sides_at_jump(self, two_level_target):
        assert two_level_target.value(0.5, side="right") == 2.0
        assert two_level_target.value(0.5, side="left") == 1.0
        assert two_level_target.value(0.0, side="left") == 1.0
        assert two_level_target.value(1.0, side="right") == 2.0
        np.testing.assert_array_equal(
            two_level_target.value([0.0, 0.49, 0.5, 1.0]), [1.0, 1.0, 2.0, 2.0]
        )

    def test_value_outside_span(self, two_level_target):
        with pytest.raises(DomainError, match="outside the target's span"):
            two_level_target.value(1.5)

    def test_value_needs_deterministic(self, asian_spec):
        target = TargetProcess.from_asian(asian_spec)
        with pytest.raises(DomainError, match="deterministic targets only"):
            target.value(0.3)

    def test_sample_on_grid_clips_singular_node(self, singular_target):
        grid = TimeGrid.uniform(1.0, 4)
        vals = singular_target.sample_on_grid(grid)
        h = 0.25
        assert vals[2] == pytest.approx((0.5 * h) ** -0.25, rel=1e-15)
        assert np.all(np.isfinite(vals))
        raw = singular_target.sample_on_grid(grid, clip_singular=False)
        assert np.isinf(raw[2])

    def test_from_paths_validation(self):
        grid = TimeGrid.uniform(1.0, 4)
        good = np.zeros((3, 5))
        with pytest.raises(ValueError, match=r"shape \(n_paths, n_nodes\)"):
            TargetProcess.from_paths(grid, np.zeros((3, 4)))
        with pytest.raises(ValueError, match="state must match"):
            TargetProcess.from_paths(grid, good, state=np.zeros((2, 5)))
        with pytest.raises(ValueError, match="weights must be nonnegative"):
            TargetProcess.from_paths(grid, good, weights=[-1.0, 1.0, 1.0])


class TestTerminalConstraint:
    def test_kinds(self):
        assert TerminalConstraint.none().kind == "none"
        det = TerminalConstraint.deterministic(0.7)
        assert det.kind == "deterministic"
        assert det.value == 0.7

    def test_brownian_monitor_second_moment(self):
        c = TerminalConstraint.brownian_monitor(0.7, scale=2.0)
        assert c.kind == "martingale"
        assert c.second_moment(0.5) == pytest.approx(4.0 * 0.5, rel=1e-15)
        assert c.second_moment(0.9) == pytest.approx(4.0 * 0.7, rel=1e-15)
        np.testing.assert_allclose(
            c.second_moment(np.array([0.1, 0.7, 2.0])),
            [0.4, 2.8, 2.8],
            rtol=1e-15,
        )

    def test_monitor_time_positive(self):
        with pytest.raises(ValueError, match="monitor_time must be > 0"):
            TerminalConstraint.brownian_monitor(0.0)


class TestQuadraticVariation:
    def test_deterministic_is_zero(self):
        qv = signal_quadratic_variation(np.array([1.0, 4.0, 9.0]))
        np.testing.assert_array_equal(qv, np.zeros(3))

    def test_single_path_exact(self):
        qv = signal_quadratic_variation(np.array([[0.0, 1.0, 3.0]]))
        np.testing.assert_allclose(qv, [0.0, 1.0, 5.0], rtol=1e-15)

    def test_weights_select_paths(self):
        vals = np.array([[0.0, 1.0, 3.0], [0.0, 10.0, 10.0]])
        qv = signal_quadratic_variation(vals, weights=[1.0, 0.0])
        np.testing.assert_allclose(qv, [0.0, 1.0, 5.0], rtol=1e-15)

    def test_brownian_qv_near_horizon_variance(self, asian_spec):
        grid = TimeGrid.uniform(1.0, 500)
        ens = simulate_paths(asian_spec, grid, 2000, seed=77)
        qv = signal_quadratic_variation(ens.values)
        assert qv[0] == 0.0
        assert np.all(np.diff(qv) >= 0.0)
        assert abs(qv[-1] - 1.0) < 0.02


class TestDeterministicSignals:
    def test_constant_target_signal_is_constant(self, unit_params):
        target = TargetProcess.deterministic(
            [TargetSegment(0.0, 1.0, Constant(3.0))]
        )
        sig = signal_unconstrained(unit_params, target, TimeGrid.uniform(1.0, 8))
        np.testing.assert_allclose(sig.values, 3.0, rtol=1e-13)
        assert sig.method == "closed_form"
        assert sig.flavor == "unconstrained"

    def test_two_level_frozen_at_origin(self, unit_params, two_level_target):
        sig = signal_unconstrained(unit_params, two_level_target, grid_with_half(10))
        assert sig.values[0] == pytest.approx(TWO_LEVEL_SIGNAL_0, rel=1e-13)

    def test_two_level_after_jump_is_constant(self, unit_params, two_level_target):
        grid = grid_with_half(10)
        sig = signal_unconstrained(unit_params, two_level_target, grid)
        after = grid.nodes >= 0.5
        np.testing.assert_allclose(sig.values[after], 2.0, rtol=1e-13)

    def test_averaging_bounds(self, unit_params, two_level_target):
        sig = signal_unconstrained(unit_params, two_level_target, grid_with_half(64))
        assert np.all(sig.values >= 1.0 - 1e-12)
        assert np.all(sig.values <= 2.0 + 1e-12)

    def test_jump_smoothing_left_limit(self, unit_params, two_level_target):
        # the signal is continuous at the target's jump
        gaps = []
        for delta in (1e-2, 1e-4, 1e-6):
            v, _ = deterministic_signal_values(
                unit_params, two_level_target, 0.5 - delta, "unconstrained"
            )
            gaps.append(abs(v - 2.0))
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 1e-5

    def test_final_node_is_left_limit(self, unit_params, two_level_target):
        sig = signal_unconstrained(unit_params, two_level_target, grid_with_half(10))
        assert sig.values[-1] == 2.0

    def test_missing_structural_time(self, unit_params, two_level_target):
        grid = TimeGrid.uniform(1.0, 7)
        with pytest.raises(AlignmentError, match="missing the target's structural time"):
            signal_unconstrained(unit_params, two_level_target, grid)

    def test_horizon_mismatch(self, unit_params, two_level_target):
        grid = TimeGrid.uniform(2.0, 10)
        with pytest.raises(AlignmentError, match="horizon differs"):
            signal_unconstrained(unit_params, two_level_target, grid)

    def test_signal_beyond_horizon(self, unit_params, two_level_target):
        with pytest.raises(DomainError, match="strictly before the horizon"):
            deterministic_signal_values(
                unit_params, two_level_target, 1.0, "unconstrained"
            )

    def test_constrained_frozen_at_origin(self, unit_params, two_level_target):
        sig = signal_constrained(
            unit_params,
            two_level_target,
            TerminalConstraint.deterministic(0.0),
            grid_with_half(10),
        )
        assert sig.values[0] == pytest.approx(TWO_LEVEL_SIGNAL_C_0, rel=1e-13)
        assert sig.terminal_value == 0.0

    def test_constrained_terminal_node_exact(self, unit_params, two_level_target):
        sig = signal_constrained(
            unit_params,
            two_level_target,
            TerminalConstraint.deterministic(0.25),
            grid_with_half(10),
        )
        assert sig.values[-1] == 0.25

    def test_constrained_blend_identity(self, unit_params, two_level_target):
        # constrained signal = w * terminal + (1 - w) * kernel average
        cval = 0.4
        t = np.array([0.0, 0.3, 0.7])
        body, _ = deterministic_signal_values(
            unit_params, two_level_target, t, "constrained", constraint_value=cval
        )
        w = terminal_weight(unit_params, t)
        lvl = np.where(t < 0.5, 1.0, 0.0)
        avg = np.empty(t.size)
        for i, ti in enumerate(t):
            m1 = kernel_constrained_mass(unit_params, ti, ti, 0.5) if ti < 0.5 else 0.0
            m2 = kernel_constrained_mass(unit_params, ti, max(ti, 0.5), 1.0)
            avg[i] = 1.0 * m1 + 2.0 * m2
        np.testing.assert_allclose(body, w * cval + (1.0 - w) * avg, rtol=1e-13)

    def test_constrained_needs_constraint(self, unit_params, two_level_target):
        with pytest.raises(DomainError, match="needs a terminal constraint"):
            signal_constrained(
                unit_params,
                two_level_target,
                TerminalConstraint.none(),
                grid_with_half(10),
            )

    def test_constrained_rejects_martingale(self, unit_params, two_level_target):
        with pytest.raises(DomainError, match="deterministic terminal values"):
            signal_constrained(
                unit_params,
                two_level_target,
                TerminalConstraint.brownian_monitor(0.5),
                grid_with_half(10),
            )


class TestQuadratureCrossCheck:
    def test_polynomial_frozen_anchor(self, unit_params):
        target = TargetProcess.deterministic(
            [TargetSegment(0.0, 1.0, PolynomialShape((0.0, 0.0, 1.0)))]
        )
        v, used_quad = deterministic_signal_values(
            unit_params, target, 0.0, "unconstrained"
        )
        assert not used_quad
        assert v == pytest.approx(POLY_U2_SIGNAL_0, rel=1e-13)

    def test_polynomial_closed_vs_quadrature(self, unit_params):
        target = TargetProcess.deterministic(
            [
                TargetSegment(0.0, 0.5, PolynomialShape((1.0, -2.0, 3.0))),
                TargetSegment(0.5, 1.0, PolynomialShape((0.5, 1.0))),
            ]
        )
        t = np.linspace(0.0, 0.95, 13)
        for flavor in ("unconstrained", "constrained"):
            closed, _ = deterministic_signal_values(
                unit_params, target, t, flavor, constraint_value=0.3
            )
            quad, _ = deterministic_signal_values(
                unit_params, target, t, flavor, constraint_value=0.3,
                method="quadrature",
            )
            np.testing.assert_allclose(closed, quad, atol=1e-8)

    def test_polynomial_other_kappa(self):
        params = ModelParams(kappa=0.04, horizon=2.0)
        target = TargetProcess.deterministic(
            [TargetSegment(0.0, 2.0, PolynomialShape((0.0, 1.0, -0.5, 0.25)))]
        )
        t = np.linspace(0.0, 1.9, 9)
        closed, _ = deterministic_signal_values(params, target, t, "unconstrained")
        quad, _ = deterministic_signal_values(
            params, target, t, "unconstrained", method="quadrature"
        )
        np.testing.assert_allclose(closed, quad, rtol=1e-9, atol=1e-12)

    def test_singular_frozen_anchors(self, unit_params, singular_target):
        v0, used_quad = deterministic_signal_values(
            unit_params, singular_target, 0.0, "unconstrained"
        )
        assert used_quad
        assert v0 == pytest.approx(FIG2_SIGNAL_0, rel=1e-12)
        vq, _ = deterministic_signal_values(
            unit_params, singular_target, 0.25, "unconstrained"
        )
        assert vq == pytest.approx(FIG2_SIGNAL_QTR, rel=1e-12)
        vc, _ = deterministic_signal_values(
            unit_params, singular_target, 0.0, "constrained", constraint_value=0.0
        )
        assert vc == pytest.approx(FIG2_SIGNAL_C_0, rel=1e-12)

    def test_singular_graded_vs_adaptive(self, unit_params, singular_target):
        t = np.array([0.0, 0.2, 0.45, 0.6, 0.9])
        graded, _ = deterministic_signal_values(
            unit_params, singular_target, t, "unconstrained"
        )
        adaptive, _ = deterministic_signal_values(
            unit_params, singular_target, t, "unconstrained", method="quadrature"
        )
        np.testing.assert_allclose(graded, adaptive, atol=1e-8)


class TestAsianSignal:
    def test_frozen_at_origin(self, unit_params, asian_spec):
        assert asian_signal(unit_params, asian_spec, 0.0, 0.0) == pytest.approx(
            ASIAN_SIGNAL_0, rel=1e-14
        )

    def test_constrained_frozen_at_origin(self, unit_params, asian_spec):
        v = asian_signal(
            unit_params, asian_spec, 0.0, 0.0, flavor="constrained"
        )
        assert v == pytest.approx(ASIAN_SIGNAL_C_0, rel=1e-14)

    def test_early_factorization_exact(self, unit_params, asian_spec):
        # before the fixing the signal is the hedge ratio times a
        # deterministic discount of the frozen averaging weight
        for t in (0.0, 0.2, 0.45):
            for s in (-0.5, 0.0, 0.8):
                lhs = asian_signal(unit_params, asian_spec, t, s)
                rhs = asian_delta(asian_spec, t, s) * (
                    1.0 - 0.5 * kernel_unconstrained_mass(unit_params, t, 0.5, 1.0)
                )
                assert lhs == rhs

    def test_late_equals_delta_exact(self, unit_params, asian_spec):
        for t in (0.55, 0.75, 0.95):
            for s in (-0.3, 0.1, 0.6):
                lhs = asian_signal(unit_params, asian_spec, t, s, s_half=0.2)
                rhs = asian_delta(asian_spec, t, s, s_half=0.2)
                assert lhs == rhs

    def test_continuous_at_fixing(self, unit_params, asian_spec):
        s = 0.3
        left = asian_signal(unit_params, asian_spec, 0.5 - 1e-9, s)
        at = asian_signal(unit_params, asian_spec, 0.5, s, s_half=s)
        assert abs(left - at) < 1e-8

    def test_constrained_blend(self, unit_params, asian_spec):
        cval = 0.6
        t, s = 0.7, 0.2
        w = terminal_weight(unit_params, t)
        base = asian_signal(unit_params, asian_spec, t, s, s_half=0.1)
        v = asian_signal(
            unit_params, asian_spec, t, s, s_half=0.1,
            flavor="constrained", constraint_value=cval,
        )
        assert v == pytest.approx(w * cval + (1.0 - w) * base, rel=1e-14)

    def test_horizon_mismatch(self, asian_spec):
        params = ModelParams(kappa=1.0, horizon=2.0)
        with pytest.raises(DomainError, match="claim maturity must equal"):
            asian_signal(params, asian_spec, 0.0, 0.0)

    def test_missing_fixing_state(self, unit_params, asian_spec):
        with pytest.raises(DomainError, match="state at the first fixing"):
            asian_signal(unit_params, asian_spec, 0.6, 0.0)

    def test_time_domain(self, unit_params, asian_spec):
        with pytest.raises(DomainError, match=r"defined on \[0, horizon\)"):
            asian_signal(unit_params, asian_spec, 1.0, 0.0, s_half=0.0)
        with pytest.raises(DomainError, match=r"defined on \[0, horizon\)"):
            asian_signal(unit_params, asian_spec, -0.1, 0.0)


class TestAsianSignalPaths:
    def test_fixing_node_uses_post_jump_ratio(self, unit_params, asian_spec):
        grid = grid_with_half(8)
        ens = simulate_paths(asian_spec, grid, 50, seed=11)
        sig = asian_signal_paths(unit_params, asian_spec, ens)
        i_half = grid.index_of(0.5)
        s_half = ens.values[:, i_half]
        np.testing.assert_array_equal(
            sig.values[:, i_half], asian_delta_post_fixing(asian_spec, s_half)
        )

    def test_terminal_node_is_payoff_slope(self, unit_params, asian_spec):
        grid = grid_with_half(8)
        ens = simulate_paths(asian_spec, grid, 50, seed=11)
        sig = asian_signal_paths(unit_params, asian_spec, ens)
        i_half = grid.index_of(0.5)
        np.testing.assert_array_equal(
            sig.values[:, -1],
            asian_delta_terminal(asian_spec, ens.values[:, i_half], ens.values[:, -1]),
        )

    def test_matches_pointwise_signal(self, unit_params, asian_spec):
        grid = grid_with_half(6)
        ens = simulate_paths(asian_spec, grid, 20, seed=3)
        sig = asian_signal_paths(unit_params, asian_spec, ens)
        i_half = grid.index_of(0.5)
        for row in (0, 7, 19):
            for k in range(grid.nodes.size - 1):
                expected = asian_signal(
                    unit_params, asian_spec, grid.nodes[k], ens.values[row, k],
                    s_half=ens.values[row, i_half],
                )
                assert sig.values[row, k] == pytest.approx(expected, rel=1e-14)

    def test_qv_profile(self, unit_params, asian_spec):
        grid = grid_with_half(8)
        ens = simulate_paths(asian_spec, grid, 200, seed=5)
        sig = asian_signal_paths(unit_params, asian_spec, ens)
        assert sig.qv_cumulative is not None
        assert sig.qv_cumulative[0] == 0.0
        assert np.all(np.diff(sig.qv_cumulative) >= 0.0)

    def test_constrained_terminal_column(self, unit_params, asian_spec):
        grid = grid_with_half(8)
        ens = simulate_paths(asian_spec, grid, 30, seed=9)
        sig = asian_signal_paths(
            unit_params, asian_spec, ens, flavor="constrained",
            constraint_value=0.5,
        )
        np.testing.assert_array_equal(sig.values[:, -1], 0.5)
        assert sig.terminal_value == 0.5


class TestAsianSignalMC:
    def test_unbiased_at_origin(self, unit_params, asian_spec):
        grid = grid_with_half(10)
        est, se = asian_signal_mc(
            unit_params, asian_spec, grid, 0.0, 0.3, n_paths=4000, seed=21
        )
        truth = asian_signal(unit_params, asian_spec, 0.0, 0.3)
        assert se > 0.0
        assert abs(est - truth) <= 3.0 * se

    def test_unbiased_after_fixing(self, unit_params, asian_spec):
        grid = grid_with_half(8)
        est, se = asian_signal_mc(
            unit_params, asian_spec, grid, 0.75, 0.2, n_paths=2000, seed=22,
            s_half=0.4,
        )
        truth = asian_signal(unit_params, asian_spec, 0.75, 0.2, s_half=0.4)
        assert abs(est - truth) <= 3.0 * se

    def test_constrained_flavor(self, unit_params, asian_spec):
        grid = grid_with_half(10)
        est, se = asian_signal_mc(
            unit_params, asian_spec, grid, 0.0, 0.1, n_paths=3000, seed=23,
            flavor="constrained", constraint_value=0.3,
        )
        truth = asian_signal(
            unit_params, asian_spec, 0.0, 0.1, flavor="constrained",
            constraint_value=0.3,
        )
        assert abs(est - truth) <= 3.0 * se

    def test_off_grid_time(self, unit_params, asian_spec):
        grid = grid_with_half(10)
        with pytest.raises(AlignmentError, match="not a grid node"):
            asian_signal_mc(
                unit_params, asian_spec, grid, 0.33, 0.0, n_paths=100, seed=1
            )

    def test_needs_time_before_horizon(self, unit_params, asian_spec):
        grid = grid_with_half(10)
        with pytest.raises(DomainError, match="strictly before the horizon"):
            asian_signal_mc(
                unit_params, asian_spec, grid, 1.0, 0.0, n_paths=100, seed=1
            )


class TestEnsembleSignals:
    def test_constant_paths_reproduce_level(self, unit_params):
        grid = TimeGrid.uniform(1.0, 6)
        n = 40
        rng = np.random.default_rng(0)
        paths = np.full((n, 7), 5.0)
        state = rng.normal(size=(n, 7))
        target = TargetProcess.from_paths(grid, paths, state=state)
        sig = signal_unconstrained(unit_params, target, grid)
        assert sig.method == "monte_carlo"
        np.testing.assert_allclose(sig.values[:, :-1], 5.0, rtol=1e-10)
        np.testing.assert_array_equal(sig.values[:, -1], 5.0)

    def test_martingale_target_tracks_state(self, unit_params, asian_spec):
        # for a martingale target the signal equals the current state
        grid = TimeGrid.uniform(1.0, 25)
        ens = simulate_paths(asian_spec, grid, 4000, seed=31)
        target = TargetProcess.from_paths(grid, ens.values, state=ens.values)
        sig = signal_unconstrained(unit_params, target, grid)
        k = 10
        resid = sig.values[:, k] - ens.values[:, k]
        assert np.sqrt(np.mean(resid ** 2)) < 0.05

    def test_constant_state_falls_back_to_mean(self, unit_params):
        grid = TimeGrid.uniform(1.0, 4)
        paths = np.linspace(0.0, 1.0, 12)[:, None] * np.ones((12, 5))
        state = np.ones((12, 5))
        target = TargetProcess.from_paths(grid, paths, state=state)
        sig = signal_unconstrained(unit_params, target, grid)
        assert np.unique(sig.values[:, 0]).size == 1

    def test_constrained_terminal_column(self, unit_params, asian_spec):
        grid = TimeGrid.uniform(1.0, 6)
        ens = simulate_paths(asian_spec, grid, 60, seed=13)
        target = TargetProcess.from_paths(grid, ens.values, state=ens.values)
        sig = signal_constrained(
            unit_params, target, TerminalConstraint.deterministic(0.2), grid
        )
        np.testing.assert_array_equal(sig.values[:, -1], 0.2)

    def test_needs_state(self, unit_params):
        grid = TimeGrid.uniform(1.0, 4)
        target = TargetProcess.from_paths(grid, np.zeros((3, 5)))
        with pytest.raises(DomainError, match="needs the Markov state"):
            signal_unconstrained(unit_params, target, grid)

    def test_degree_cap(self, unit_params):
        grid = TimeGrid.uniform(1.0, 4)
        target = TargetProcess.from_paths(
            grid, np.zeros((3, 5)), state=np.ones((3, 5))
        )
        with pytest.raises(ValueError, match="capped at degree 3"):
            signal_from_paths(unit_params, target, degree=4)


class TestSignalPathContainer:
    def test_values_must_cover_grid(self, unit_params):
        grid = TimeGrid.uniform(1.0, 4)
        with pytest.raises(ValueError, match="cover every grid node"):
            ih.SignalPath(grid=grid, values=np.zeros(4), flavor="unconstrained",
                          method="closed_form")

    def test_flavor_names(self, unit_params):
        grid = TimeGrid.uniform(1.0, 4)
        with pytest.raises(ValueError, match="flavor must be"):
            ih.SignalPath(grid=grid, values=np.zeros(5), flavor="pinned",
                          method="closed_form")

    def test_n_paths(self):
        grid = TimeGrid.uniform(1.0, 4)
        one = ih.SignalPath(grid=grid, values=np.zeros(5),
                            flavor="unconstrained", method="closed_form")
        many = ih.SignalPath(grid=grid, values=np.zeros((7, 5)),
                             flavor="unconstrained", method="closed_form")
        assert one.n_paths == 1
        assert many.n_paths == 7


class TestTargetJSON:
    def test_two_level_round_trip(self, two_level_target):
        obj = target_to_json(two_level_target)
        back = target_from_json(obj, horizon=1.0)
        assert back == two_level_target

    def test_singular_round_trip(self, singular_target):
        obj = target_to_json(singular_target)
        back = target_from_json(obj, horizon=1.0)
        assert back == singular_target

    def test_polynomial_round_trip(self):
        target = TargetProcess.deterministic(
            [TargetSegment(0.0, 1.0, PolynomialShape((1.0, 2.0, 3.0)))]
        )
        back = target_from_json(target_to_json(target), horizon=1.0)
        assert back == target

    def test_asian_round_trip(self, asian_spec):
        target = TargetProcess.from_asian(asian_spec)
        back = target_from_json(target_to_json(target), horizon=1.0)
        assert back.kind == "asian"
        assert back.asian == asian_spec

    def test_horizon_mismatch(self, two_level_target):
        obj = target_to_json(two_level_target)
        with pytest.raises(ValueError, match="do not span the model horizon"):
            target_from_json(obj, horizon=2.0)

    def test_unknown_target_kind(self):
        with pytest.raises(ValueError, match="either 'segments' or 'asian'"):
            target_from_json({"levels": []}, horizon=1.0)

    def test_unknown_shape_kind(self):
        with pytest.raises(ValueError, match="unknown shape kind"):
            target_from_json(
                {"segments": [{"from": 0.0, "to": 1.0, "shape": {"step": 1}}]},
                horizon=1.0,
            )

    def test_shape_must_be_single_key(self):
        with pytest.raises(ValueError, match="single-key object"):
            target_from_json(
                {
                    "segments": [
                        {
                            "from": 0.0,
                            "to": 1.0,
                            "shape": {"constant": 1, "polynomial": [1]},
                        }
                    ]
                },
                horizon=1.0,
            )

    def test_ensemble_not_serializable(self):
        grid = TimeGrid.uniform(1.0, 4)
        target = TargetProcess.from_paths(grid, np.zeros((3, 5)))
        with pytest.raises(ValueError, match="deterministic and asian targets"):
            target_to_json(target)
