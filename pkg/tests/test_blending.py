import numpy as np
import pytest

from teleassist.blending import BlendProfile, blend, solve_blend_profile
from teleassist.errors import ConstraintError, SchemaError

from helpers import make_trajectory


class TestSolveBlendProfile:
    def test_endpoints_exact(self):
        profile = solve_blend_profile()
        assert profile.alpha(0.0) == 0.0
        assert profile.alpha(1.0) == 1.0

    def test_crossing_constraint(self):
        profile = solve_blend_profile()
        crossing = float(profile.alpha(0.7))
        assert 0.8 < crossing < 0.9
        assert crossing == pytest.approx(0.85, abs=1e-9)

    def test_raw_logistic_endpoint_slack(self):
        for target in np.linspace(0.801, 0.899, 11):
            profile = solve_blend_profile(alpha_target=float(target))
            assert profile.raw(0.0) <= 1e-3
            assert profile.raw(1.0) >= 1.0 - 1e-3
            assert 0.8 < float(profile.alpha(0.7)) < 0.9

    def test_monotone_on_random_pairs(self):
        rng = np.random.default_rng(13)
        profile = solve_blend_profile()
        for _ in range(100):
            x1, x2 = np.sort(rng.uniform(0.0, 1.0, size=2))
            if x1 == x2:
                continue
            assert profile.alpha(x2) > profile.alpha(x1)

    def test_monotone_on_dense_grid(self):
        profile = solve_blend_profile()
        grid = profile.alpha(np.linspace(0.0, 1.0, 1000))
        assert np.all(np.diff(grid) > 0)

    def test_infeasible_targets_rejected(self):
        with pytest.raises(ConstraintError):
            solve_blend_profile(alpha_target=0.75)
        with pytest.raises(ConstraintError):
            solve_blend_profile(alpha_target=0.95)
        with pytest.raises(ConstraintError):
            solve_blend_profile(n_blend=1)


class TestBlend:
    def _tail(self, values, n):
        return make_trajectory(np.linspace(0.0, 1.0, n), values)

    def test_first_sample_is_trajectory(self):
        n = 12
        rng = np.random.default_rng(3)
        values = rng.normal(size=(n, 3))
        target = np.array([1.0, 2.0, 3.0])
        out = blend(self._tail(values, n), target, solve_blend_profile(n_blend=n))
        np.testing.assert_array_equal(out.values[0], values[0])

    def test_last_sample_is_target(self):
        n = 12
        values = np.zeros((n, 3))
        target = np.array([1.0, -2.0, 0.5])
        out = blend(self._tail(values, n), target, solve_blend_profile(n_blend=n))
        np.testing.assert_array_equal(out.values[-1], target)

    def test_constant_input_closed_form(self):
        n = 9
        p = np.array([0.5, -1.0, 2.0])
        q = np.array([3.0, 0.0, -1.0])
        profile = solve_blend_profile(n_blend=n)
        out = blend(self._tail(np.tile(p, (n, 1)), n), q, profile)
        for i in range(n):
            a = float(profile.alpha(i / (n - 1)))
            for d in range(3):
                # scalar hand computation of the mixing identity
                expected = p[d] + a * (q[d] - p[d])
                assert out.values[i, d] == pytest.approx(expected, abs=1e-12)

    def test_convex_combination_bounds(self):
        rng = np.random.default_rng(8)
        n = 20
        values = rng.normal(size=(n, 3))
        target = rng.normal(size=3)
        out = blend(self._tail(values, n), target, solve_blend_profile(n_blend=n))
        lower = np.minimum(values, target)
        upper = np.maximum(values, target)
        assert np.all(out.values >= lower - 1e-12)
        assert np.all(out.values <= upper + 1e-12)

    def test_dimension_mismatch_rejected(self):
        n = 5
        with pytest.raises(SchemaError):
            blend(self._tail(np.zeros((n, 3)), n), np.zeros(2), solve_blend_profile(n_blend=n))

    def test_sample_count_must_match_profile(self):
        with pytest.raises(SchemaError):
            blend(self._tail(np.zeros((5, 3)), 5), np.zeros(3), solve_blend_profile(n_blend=9))


def test_profile_roundtrips_to_dict():
    profile = solve_blend_profile(n_blend=7)
    doc = profile.to_dict()
    again = BlendProfile(**doc)
    np.testing.assert_allclose(again.alpha(0.7), profile.alpha(0.7))
