import numpy as np
import pytest

from wgnoise import (
    AdamState,
    BlockLayout,
    DivergenceError,
    OptimizerConfig,
    RegularizerSpec,
    ValidationError,
    adam_step,
    feasibility_residuals,
    project_to_feasible,
    projected_ascent,
    regularized_ascent,
    spike_reward,
)

LAYOUT = BlockLayout.for_dimension(256, 16)


def spike(x):
    return spike_reward(x, 0)


def gaussian(n, seed):
    return np.random.default_rng(seed).standard_normal(n)


class TestAdam:
    def test_zero_gradient_gives_zero_increment(self):
        state = AdamState.zeros(4)
        for _ in range(10):
            increment = adam_step(state, np.zeros(4), 0.02)
            np.testing.assert_array_equal(increment, np.zeros(4))

    def test_first_step_closed_form(self):
        # with bias correction, mhat = g and vhat = g^2 on step one
        g = np.array([0.5, -2.0, 1e-3])
        state = AdamState.zeros(3)
        increment = adam_step(state, g, 0.02, epsilon=1e-8)
        expected = 0.02 * g / (np.abs(g) + 1e-8)
        np.testing.assert_allclose(increment, expected, rtol=1e-15)

    def test_ten_step_trace_matches_scalar_reference(self):
        # independent plain-float Adam on f(x) = x^2, descending via -grad
        eta, b1, b2, eps = 0.1, 0.9, 0.999, 1e-8
        x_ref, m, v = 1.0, 0.0, 0.0
        ref = []
        for t in range(1, 11):
            g = 2.0 * x_ref
            m = b1 * m + (1 - b1) * g
            v = b2 * v + (1 - b2) * g * g
            mhat = m / (1 - b1**t)
            vhat = v / (1 - b2**t)
            x_ref = x_ref - eta * mhat / (vhat**0.5 + eps)
            ref.append(x_ref)

        state = AdamState.zeros(1)
        x = np.array([1.0])
        for t in range(10):
            increment = adam_step(state, 2.0 * x, eta, beta1=b1, beta2=b2, epsilon=eps)
            x = x - increment
            assert abs(x[0] - ref[t]) < 1e-12

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            adam_step(AdamState.zeros(3), np.zeros(4), 0.02)


class TestOptimizerConfig:
    def test_defaults(self):
        config = OptimizerConfig()
        assert config.step_size == 0.02
        assert config.iterations == 200
        assert config.clip_threshold == 0.03
        assert (config.adam_beta1, config.adam_beta2) == (0.9, 0.999)
        assert config.adam_epsilon == 1e-8
        assert config.project_gradient is True

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"step_size": 0.0},
            {"iterations": 0},
            {"clip_threshold": -1.0},
            {"adam_beta1": 1.0},
            {"adam_epsilon": 0.0},
            {"mode": "annealed"},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValidationError):
            OptimizerConfig(**kwargs)


class TestProjectedAscent:
    def test_constant_objective_is_fixed_point(self):
        x0 = gaussian(256, 0)
        start = project_to_feasible(x0, LAYOUT, seed=3).output
        config = OptimizerConfig(iterations=20, seed=3)
        trajectory = projected_ascent(lambda v: (1.5, np.zeros_like(v)), x0, LAYOUT, config)
        values = trajectory.values
        assert (values == 1.5).all()
        assert np.abs(trajectory.final_latent - start).max() < 1e-9

    def test_record_count_and_indices(self):
        config = OptimizerConfig(iterations=7, seed=0)
        trajectory = projected_ascent(spike, gaussian(256, 1), LAYOUT, config)
        assert len(trajectory.points) == 8
        assert [p.iteration for p in trajectory.points] == list(range(8))

    def test_every_iterate_feasible(self):
        config = OptimizerConfig(iterations=30, seed=2)
        trajectory = projected_ascent(spike, gaussian(256, 2), LAYOUT, config)
        tol = 1e-9 * LAYOUT.block_size
        for point in trajectory.points:
            assert point.max_residual < tol
            assert abs(point.norm_sq - LAYOUT.n) < 1e-9 * LAYOUT.n

    def test_bit_reproducible(self):
        config = OptimizerConfig(iterations=25, seed=9)
        x0 = gaussian(256, 3)
        a = projected_ascent(spike, x0, LAYOUT, config)
        b = projected_ascent(spike, x0, LAYOUT, config)
        assert a.final_latent.tobytes() == b.final_latent.tobytes()
        assert (a.values == b.values).all()

    def test_objective_values_bounded_by_cap(self):
        config = OptimizerConfig(iterations=120, seed=4)
        trajectory = projected_ascent(spike, gaussian(256, 4), LAYOUT, config)
        assert trajectory.values.max() <= 7.185
        # ascent makes clear progress from the starting value
        assert trajectory.values[-1] > trajectory.values[0] + 1.0

    def test_divergent_objective_carries_partial_trajectory(self):
        calls = {"count": 0}

        def exploding(v):
            calls["count"] += 1
            if calls["count"] > 3:
                return float("nan"), np.zeros_like(v)
            return 1.0, np.ones_like(v) * 0.01

        config = OptimizerConfig(iterations=50, seed=5)
        with pytest.raises(DivergenceError) as excinfo:
            projected_ascent(exploding, gaussian(256, 5), LAYOUT, config)
        partial = excinfo.value.trajectory
        assert partial is not None
        assert len(partial.points) == 3
        assert partial.final_latent is not None

    def test_runaway_value_is_divergence(self):
        config = OptimizerConfig(iterations=5, seed=6)
        with pytest.raises(DivergenceError):
            projected_ascent(lambda v: (1e13, np.zeros_like(v)), gaussian(256, 6), LAYOUT, config)


class TestRegularizedAscent:
    def test_lambda_zero_matches_unconstrained(self):
        x0 = gaussian(256, 7)
        config = OptimizerConfig(iterations=15, seed=7, mode="regularized")
        spec = RegularizerSpec(kind="norm_chi", coefficient=0.0)
        with_reg = regularized_ascent(spike, spec, x0, LAYOUT, config)
        without = regularized_ascent(spike, None, x0, LAYOUT, config)
        assert (with_reg.values == without.values).all()
        np.testing.assert_array_equal(with_reg.final_latent, without.final_latent)

    def test_unconstrained_spike_exceeds_cap_tenfold(self):
        x0 = project_to_feasible(gaussian(256, 8), LAYOUT, seed=0).output
        config = OptimizerConfig(iterations=100, seed=8, mode="unconstrained")
        trajectory = regularized_ascent(spike, None, x0, LAYOUT, config)
        assert trajectory.values.max() > 71.8

    def test_norm_chi_regularizer_does_not_cap_spike(self):
        x0 = project_to_feasible(gaussian(256, 9), LAYOUT, seed=0).output
        config = OptimizerConfig(iterations=300, seed=9, mode="regularized")
        spec = RegularizerSpec(kind="norm_chi", coefficient=2.0)
        trajectory = regularized_ascent(spike, spec, x0, LAYOUT, config)
        assert trajectory.values.max() > 71.8

    def test_power_spectral_residuals_nonzero_throughout(self):
        x0 = gaussian(256, 10)
        config = OptimizerConfig(iterations=20, seed=10, mode="regularized")
        spec = RegularizerSpec(kind="power_spectral", coefficient=2.0)
        trajectory = regularized_ascent(spike, spec, x0, LAYOUT, config)
        assert all(p.max_residual > 1e-6 for p in trajectory.points)

    def test_residuals_recorded_but_not_enforced(self):
        x0 = gaussian(256, 11)
        config = OptimizerConfig(iterations=10, seed=11, mode="unconstrained")
        trajectory = regularized_ascent(spike, None, x0, LAYOUT, config)
        l1, l2 = feasibility_residuals(trajectory.final_latent, LAYOUT)
        assert trajectory.points[-1].max_residual == pytest.approx(
            max(l1.max(), l2.max()), rel=1e-12
        )


class TestTrajectoryCsv:
    def test_columns_and_rows(self, tmp_path):
        config = OptimizerConfig(iterations=4, seed=12)
        trajectory = projected_ascent(spike, gaussian(256, 12), LAYOUT, config)
        path = tmp_path / "trajectory.csv"
        trajectory.write_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "iteration,value,norm_sq,max_residual,cos_to_init"
        assert len(lines) == 6
        assert path.read_text().count("\r") == 0
