"""Closed-form initial value problem solvers: worked-example values,
structural identities, the data commutation hypothesis, and agreement
between independent routes to the same solution."""

from __future__ import annotations

import numpy as np
import pytest

from delaymat import (
    DelaySystem,
    ForcingSpec,
    HistorySpec,
    HypothesisViolation,
    UnsupportedHypothesisWarning,
    build_fundamental_continuous,
    fixtures,
    solve_continuous,
    solve_continuous_homogeneous,
    solve_discrete,
    solve_discrete_homogeneous,
    validate_hypotheses,
)
from delaymat.generators import (
    random_discrete_scalar_data,
    random_scalar_forcing,
    random_scalar_history,
    random_system,
)
from delaymat.linalg import max_abs
from delaymat.ppoly import MatrixPolynomial, PiecewiseMatrixPolynomial


def zero_history(d, sigma):
    return HistorySpec.from_ppoly(
        PiecewiseMatrixPolynomial(
            [-sigma, 0.0], [MatrixPolynomial.zero(d)]
        )
    )


class TestHypothesisCheck:
    def test_scalar_data_passes_exactly(self, ex1_system, ex1_history, ex1_forcing):
        report = validate_hypotheses(ex1_system, ex1_history, ex1_forcing)
        assert report.ok
        assert report.history_residual == 0.0
        assert report.forcing_residual == 0.0
        assert "ok" in report.summary()

    def test_noncommuting_forcing_is_flagged(self, ex1_system, ex1_history):
        bad = ForcingSpec.from_ppoly(
            PiecewiseMatrixPolynomial(
                [0.0, 3.0],
                [MatrixPolynomial.constant([[0.0, 1.0], [0.0, 0.0]])],
                right_extension=True,
            )
        )
        report = validate_hypotheses(ex1_system, ex1_history, bad)
        assert not report.ok
        assert report.forcing_residual > 0.1
        assert "VIOLATED" in report.summary()

    def test_solve_refuses_noncommuting_data(self, ex1_system, ex1_history):
        bad = ForcingSpec.from_ppoly(
            PiecewiseMatrixPolynomial(
                [0.0, 3.0],
                [MatrixPolynomial.constant([[0.0, 1.0], [0.0, 0.0]])],
                right_extension=True,
            )
        )
        with pytest.raises(HypothesisViolation):
            solve_continuous(ex1_system, ex1_history, bad, 2.0)

    def test_override_warns_and_returns_a_formal_result(
        self, ex1_system, ex1_history
    ):
        bad = ForcingSpec.from_ppoly(
            PiecewiseMatrixPolynomial(
                [0.0, 3.0],
                [MatrixPolynomial.constant([[0.0, 1.0], [0.0, 0.0]])],
                right_extension=True,
            )
        )
        with pytest.warns(UnsupportedHypothesisWarning):
            x = solve_continuous(
                ex1_system, ex1_history, bad, 2.0, allow_noncommuting_data=True
            )
        assert x.dim == 2  # a formal evaluation is still produced

    def test_tolerance_is_adjustable(self, ex1_system, ex1_history):
        slightly_off = ForcingSpec.from_ppoly(
            PiecewiseMatrixPolynomial(
                [0.0, 3.0],
                [MatrixPolynomial.constant([[1.0, 1e-8], [0.0, 1.0]])],
                right_extension=True,
            )
        )
        assert not validate_hypotheses(
            ex1_system, ex1_history.ppoly, slightly_off
        ).ok
        x = solve_continuous(
            ex1_system, ex1_history, slightly_off, 1.0, hypothesis_tol=1e-6
        )
        assert x.dim == 2

    def test_callable_forcing_needs_a_step_bound(self, ex2_system, ex2_history):
        g = ForcingSpec.from_callable(lambda u: np.eye(2))
        with pytest.raises(ValueError):
            validate_hypotheses(ex2_system, ex2_history, g)
        report = validate_hypotheses(ex2_system, ex2_history, g, steps=6)
        assert report.ok


class TestContinuousWorkedExample:
    @pytest.fixture
    def x1(self, ex1_system, ex1_history, ex1_forcing):
        return solve_continuous(ex1_system, ex1_history, ex1_forcing, 3.0)

    def test_midwindow_value(self, x1):
        np.testing.assert_allclose(
            x1.eval(0.5), [[0.125, -0.375], [0.0, -0.25]], atol=1e-12
        )

    def test_second_window_value(self, x1):
        assert x1.eval(1.5)[0, 0] == pytest.approx(49.0 / 48.0, abs=1e-12)

    def test_all_segment_displays(self, x1):
        for entry in fixtures.EXAMPLE1_X_ENTRIES:
            ts = fixtures.segment_samples(entry.lo, entry.hi, 25)
            got = x1.eval(ts)[:, entry.row, entry.col]
            assert max_abs(got - entry.eval(ts)) <= 1e-11, entry.label("X")

    def test_reproduces_the_history(self, x1, ex1_history):
        ts = np.linspace(-1.0, -1e-9, 50)
        assert max_abs(x1.eval(ts) - ex1_history.ppoly.eval(ts)) <= 1e-12

    def test_continuous_at_zero(self, x1):
        assert max_abs(x1.eval(1e-12) - x1.eval(-1e-12)) <= 1e-9

    def test_alternative_route_via_the_fundamental_solution(
        self, ex1_system, x1
    ):
        # for this particular data the solution reduces to
        # X(t) = -Z(t) + int_{-sigma}^{t} Z(v) dv
        z = build_fundamental_continuous(ex1_system, 3.0)
        for t in np.linspace(-0.9, 2.9, 39):
            alt = -z.eval(t) + z.integrate(-1.0, t)
            assert max_abs(x1.eval(t) - alt) <= 1e-11, f"t={t}"


class TestContinuousStructure:
    def test_zero_data_gives_zero_solution(self, ex1_system):
        x = solve_continuous(ex1_system, zero_history(2, 1.0), None, 2.0)
        ts = np.linspace(-1.0, 1.999, 60)
        assert max_abs(x.eval(ts)) == 0.0

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_superposition(self, seed):
        rng = np.random.default_rng(500 + seed)
        sys = random_system(rng, 2, "continuous")
        hist = random_scalar_history(rng, sys)
        force = random_scalar_forcing(rng, sys, 3.0)
        full = solve_continuous(sys, hist, force, 3.0)
        hist_only = solve_continuous(sys, hist, None, 3.0)
        force_only = solve_continuous(sys, zero_history(2, 1.0), force, 3.0)
        ts = np.linspace(-1.0, 2.999, 77)
        combined = hist_only.eval(ts) + force_only.eval(ts)
        assert max_abs(full.eval(ts) - combined) <= 1e-9

    @pytest.mark.parametrize("seed", [3, 4, 5])
    def test_defining_equation_residual(self, seed):
        rng = np.random.default_rng(600 + seed)
        d = int(rng.integers(2, 5))
        sys = random_system(rng, d, "continuous")
        hist = random_scalar_history(rng, sys)
        force = random_scalar_forcing(rng, sys, 3.0)
        x = solve_continuous(sys, hist, force, 3.0)
        rate = x.differentiate()
        knots = np.concatenate(
            [x.breakpoints, hist.ppoly.breakpoints, force.ppoly.breakpoints]
        )
        ts = np.linspace(-0.97, 2.97, 211)
        ts = ts[np.min(np.abs(ts[:, None] - knots[None, :]), axis=1) > 1e-3]
        delayed = x.eval(ts - sys.sigma)
        rhs = sys.a0 @ delayed + delayed @ sys.a1 + force.ppoly.eval(ts)
        mask = ts >= 0  # the equation constrains t >= 0 only
        resid = max_abs(rate.eval(ts)[mask] - rhs[mask])
        assert resid <= 1e-8 * max(1.0, max_abs(rhs[mask]))

    def test_homogeneous_wrapper(self, ex1_system, ex1_history):
        a = solve_continuous(ex1_system, ex1_history, None, 2.0)
        b = solve_continuous_homogeneous(ex1_system, ex1_history, 2.0)
        ts = np.linspace(-1.0, 1.999, 44)
        assert max_abs(a.eval(ts) - b.eval(ts)) == 0.0

    def test_domain_validation(self, ex1_system, ex1_history, ex1_forcing):
        short_hist = HistorySpec.from_ppoly(
            PiecewiseMatrixPolynomial(
                [-0.5, 0.0], [MatrixPolynomial.zero(2)]
            )
        )
        with pytest.raises(ValueError):
            solve_continuous(ex1_system, short_hist, None, 1.0)
        short_force = ForcingSpec.from_ppoly(
            PiecewiseMatrixPolynomial(
                [0.0, 1.0], [MatrixPolynomial.zero(2)], right_extension=False
            )
        )
        with pytest.raises(ValueError):
            solve_continuous(ex1_system, ex1_history, short_force, 2.0)
        with pytest.raises(ValueError):
            solve_continuous(ex1_system, ex1_history, ex1_forcing, -1.0)
        with pytest.raises(ValueError):
            solve_continuous(fixtures.example2_system(), ex1_history, None, 1.0)


class TestDiscreteWorkedExample:
    @pytest.fixture
    def x2(self, ex2_system, ex2_history, ex2_forcing):
        return solve_discrete(ex2_system, ex2_history, ex2_forcing, 6)

    def test_table_values_are_exact(self, x2):
        for entry in fixtures.EXAMPLE2_X_TABLE:
            np.testing.assert_array_equal(
                x2.at_time(entry.u), entry.value, err_msg=f"X({entry.u})"
            )

    def test_rows_and_times(self, x2):
        np.testing.assert_array_equal(x2.times, np.arange(-1.0, 7.0))
        assert x2.values.shape == (8, 2, 2)

    def test_reproduces_the_history(self, x2, ex2_history):
        np.testing.assert_array_equal(x2.at_time(-1), ex2_history.values[0])
        np.testing.assert_array_equal(x2.at_time(0), ex2_history.values[1])


class TestDiscreteStructure:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_defining_recursion_residual(self, seed):
        rng = np.random.default_rng(700 + seed)
        d = int(rng.integers(2, 5))
        sys = random_system(rng, d, "discrete", entry_scale=0.5)
        hist, force = random_discrete_scalar_data(rng, sys, 20)
        x = solve_discrete(sys, hist, force, 20)
        g = force.table(20, d)
        m = sys.m
        for u in range(20):
            lhs = x.at_time(u + 1) - x.at_time(u)
            delayed = x.at_time(u - m)
            rhs = sys.a0 @ delayed + delayed @ sys.a1 + g[u]
            scale = max(1.0, max_abs(rhs))
            assert max_abs(lhs - rhs) <= 1e-10 * scale, f"u={u}"

    def test_superposition(self, ex2_system, ex2_history, ex2_forcing):
        full = solve_discrete(ex2_system, ex2_history, ex2_forcing, 6)
        hist_only = solve_discrete(ex2_system, ex2_history, None, 6)
        zero_hist = HistorySpec.from_values(np.zeros((2, 2, 2)))
        force_only = solve_discrete(ex2_system, zero_hist, ex2_forcing, 6)
        np.testing.assert_array_equal(
            full.values, hist_only.values + force_only.values
        )

    def test_homogeneous_wrapper(self, ex2_system, ex2_history):
        a = solve_discrete(ex2_system, ex2_history, None, 5)
        b = solve_discrete_homogeneous(ex2_system, ex2_history, 5)
        np.testing.assert_array_equal(a.values, b.values)

    def test_zero_steps_returns_the_history_rows(self, ex2_system, ex2_history):
        x = solve_discrete(ex2_system, ex2_history, None, 0)
        np.testing.assert_array_equal(x.times, [-1.0, 0.0])
        np.testing.assert_array_equal(x.values, ex2_history.values)

    def test_shape_validation(self, ex2_system, ex1_history):
        with pytest.raises(ValueError):
            solve_discrete(ex2_system, np.zeros((3, 2, 2)), None, 4)
        with pytest.raises(ValueError):
            solve_discrete(ex2_system, ex1_history, None, 4)
        with pytest.raises(ValueError):
            solve_discrete(ex2_system, np.zeros((2, 2, 2)), None, -1)
