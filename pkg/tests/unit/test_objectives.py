"""Unit tests for objectives, projections and the duality gap."""
import math

import numpy as np
import pytest

from scsvm.errors import DimensionMismatchError, DualInfeasibleError, NegativeGapError
from scsvm.models import Dataset, DualState, PrimalModel, RawDataset, SignMask
from scsvm.services.data_io import apply_sign_mask
from scsvm.services.objectives import (
    clamp_gap,
    dual_objective,
    duality_gap,
    gap_terms,
    margins,
    primal_objective,
    primal_subgradient,
    project_ball,
    project_sign_cone,
    recover_weights,
)
from scsvm.services.oracles import (
    finite_difference_directional,
    naive_dual_objective,
    naive_primal_objective,
)
from scsvm.services.synthetic import random_alpha, random_instance


def _model(w, lam):
    w = np.asarray(w, dtype=float)
    return PrimalModel(w=w, lam=lam, sign_mask=SignMask.unconstrained(w.shape[0]))


class TestPrimalObjective:
    """Tests for primal_objective function."""

    def test_zero_weights_give_one(self, small_instance):
        """Every hinge term is 1 at w = 0."""
        data, mask = small_instance
        model = PrimalModel(w=np.zeros(data.d), lam=0.3, sign_mask=mask)
        assert primal_objective(model, data) == 1.0

    def test_single_example(self):
        """lambda=2, w=[1,0], x=[1,0], y=+1 gives 1.0."""
        data = Dataset.from_features(np.array([[1.0, 0.0]]), np.array([1]))
        assert primal_objective(_model([1.0, 0.0], 2.0), data) == pytest.approx(1.0)

    def test_matches_naive_loop(self, rng):
        """Vectorized P equals an explicit loop on a random 5x3 instance."""
        data, mask = random_instance(rng, 5, 3, normalize=False)
        w = rng.standard_normal(3)
        model = PrimalModel(w=w, lam=0.7, sign_mask=SignMask.unconstrained(3))
        expected = naive_primal_objective(w, data.features(), data.labels, 0.7)
        assert primal_objective(model, data) == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_dimension_mismatch(self, small_instance):
        """Weights of the wrong length raise."""
        data, _ = small_instance
        with pytest.raises(DimensionMismatchError):
            margins(np.zeros(data.d + 1), data)


class TestPrimalSubgradient:
    """Tests for primal_subgradient function."""

    def test_zero_weights(self, small_instance):
        """At w = 0 every example violates the margin."""
        data, mask = small_instance
        model = PrimalModel(w=np.zeros(data.d), lam=0.1, sign_mask=mask)
        expected = -data.cols.sum(axis=1) / data.n
        np.testing.assert_allclose(primal_subgradient(model, data), expected)

    def test_no_violators(self):
        """With margin 2 only the regularizer remains."""
        data = Dataset.from_features(np.array([[1.0]]), np.array([1]))
        np.testing.assert_allclose(primal_subgradient(_model([2.0], 0.5), data), [1.0])

    def test_margin_exactly_one_contributes_nothing(self):
        """The kink at margin 1 uses the zero branch."""
        data = Dataset.from_features(np.array([[1.0]]), np.array([1]))
        np.testing.assert_allclose(primal_subgradient(_model([1.0], 0.5), data), [0.5])

    def test_matches_finite_differences(self, rng):
        """Directional derivative at a non-kink point matches <g, dir>."""
        data, mask = random_instance(rng, 20, 6)
        lam = 0.2
        w = 0.5 * rng.standard_normal(6)
        direction = rng.standard_normal(6)

        def objective(x):
            return naive_primal_objective(x, data.features(), data.labels, lam)

        model = PrimalModel(w=w, lam=lam, sign_mask=SignMask.unconstrained(6))
        numeric = finite_difference_directional(objective, w, direction, 1e-6)
        assert numeric == pytest.approx(primal_subgradient(model, data) @ direction, abs=1e-5)

    def test_norm_bound_inside_ball(self, rng):
        """||g|| <= sqrt(2 lambda) + R on B intersect S."""
        data, mask = random_instance(rng, 40, 5)
        lam = 0.3
        for _ in range(200):
            w = project_ball(project_sign_cone(3.0 * rng.standard_normal(5), mask), lam)
            g = primal_subgradient(PrimalModel(w=w, lam=lam, sign_mask=mask), data)
            assert np.linalg.norm(g) <= math.sqrt(2 * lam) + data.R + 1e-12


class TestProjectSignCone:
    """Tests for project_sign_cone function."""

    def test_clips_constrained_coordinates(self):
        """v=[-1, 2, -3], sigma=[1, 0, 1] gives [0, 2, 0]."""
        mask = SignMask.from_sets(3, [0, 2], [])
        out = project_sign_cone(np.array([-1.0, 2.0, -3.0]), mask)
        np.testing.assert_array_equal(out, [0.0, 2.0, 0.0])

    def test_free_coordinates_untouched(self):
        """Only sigma=1 coordinates are clipped."""
        mask = SignMask.from_sets(3, [0], [])
        out = project_sign_cone(np.array([-1.0, 2.0, -3.0]), mask)
        np.testing.assert_array_equal(out, [0.0, 2.0, -3.0])

    def test_feasible_point_unchanged(self, rng):
        """Points of S are fixed."""
        mask = SignMask.from_sets(4, [1, 3], [])
        v = np.array([-1.0, 0.5, -2.0, 0.0])
        np.testing.assert_array_equal(project_sign_cone(v, mask), v)

    def test_idempotent_and_nearest(self, rng):
        """Output is in S, idempotent and no sampled point of S is closer."""
        mask = SignMask.from_sets(6, [0, 1, 2], [])
        for _ in range(20):
            v = rng.standard_normal(6)
            out = project_sign_cone(v, mask)
            assert np.all(out[:3] >= 0.0)
            np.testing.assert_array_equal(project_sign_cone(out, mask), out)
            candidates = np.array(
                [project_sign_cone(c, mask) for c in 2.0 * rng.standard_normal((1000, 6))]
            )
            assert np.all(np.linalg.norm(candidates - v, axis=1) >= np.linalg.norm(out - v) - 1e-12)


class TestProjectBall:
    """Tests for project_ball function."""

    def test_scales_long_vectors(self):
        """lambda=2 has radius 1: [3, 4] becomes [0.6, 0.8]."""
        np.testing.assert_allclose(project_ball(np.array([3.0, 4.0]), 2.0), [0.6, 0.8])

    def test_zero_vector(self):
        """0 stays 0."""
        np.testing.assert_array_equal(project_ball(np.zeros(3), 0.1), np.zeros(3))

    def test_inside_unchanged(self):
        """Short vectors are returned as they are."""
        np.testing.assert_array_equal(project_ball(np.array([0.1, 0.2]), 2.0), [0.1, 0.2])

    def test_composition_is_projection_onto_intersection(self, rng):
        """No sampled point of B intersect S is closer than Pi_B(Pi_S(v))."""
        mask = SignMask.from_sets(4, [0, 1], [])
        lam = 2.0
        for _ in range(20):
            v = 3.0 * rng.standard_normal(4)
            out = project_ball(project_sign_cone(v, mask), lam)
            assert np.linalg.norm(out) <= 1.0 + 1e-12
            samples = np.array(
                [project_ball(project_sign_cone(s, mask), lam)
                 for s in rng.standard_normal((1000, 4))]
            )
            assert np.all(np.linalg.norm(samples - v, axis=1) >= np.linalg.norm(out - v) - 1e-12)


class TestDualObjective:
    """Tests for dual_objective function."""

    def test_zero_alpha(self, small_instance):
        """D(0) = 0."""
        data, mask = small_instance
        assert dual_objective(DualState.zero(data, mask, 0.1), data, 0.1) == 0.0

    def test_unconstrained_matches_svm_dual(self, rng):
        """With sigma = 0, D is the classical SVM dual."""
        data, _ = random_instance(rng, 15, 4, constrained_fraction=0.0)
        mask = SignMask.unconstrained(4)
        lam = 0.25
        alpha = random_alpha(rng, data.n)
        state = DualState.from_alpha(alpha, data, mask, lam)
        xa = data.cols @ alpha
        expected = -(xa @ xa) / (2 * lam * data.n**2) + alpha.sum() / data.n
        assert dual_objective(state, data, lam) == pytest.approx(expected, rel=1e-12)
        np.testing.assert_allclose(state.w, xa / (lam * data.n), rtol=0, atol=1e-15)

    def test_matches_naive(self, rng):
        """D equals a feature-by-feature recomputation."""
        data, mask = random_instance(rng, 12, 7)
        lam = 0.05
        alpha = random_alpha(rng, data.n)
        state = DualState.from_alpha(alpha, data, mask, lam)
        expected = naive_dual_objective(alpha, data.features(), data.labels, mask.sigma, lam)
        assert dual_objective(state, data, lam) == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_box_violation(self, small_instance):
        """alpha outside the box is rejected."""
        data, mask = small_instance
        alpha = np.zeros(data.n)
        alpha[0] = -0.5
        with pytest.raises(DualInfeasibleError):
            DualState.from_alpha(alpha, data, mask, 0.1)


class TestDualityGap:
    """Tests for duality_gap function."""

    def test_zero_alpha_gives_one(self, small_instance):
        """P(0) - D(0) = 1."""
        data, mask = small_instance
        assert duality_gap(DualState.zero(data, mask, 0.1), data, 0.1) == pytest.approx(1.0)

    def test_one_example_optimum(self, one_example):
        """alpha = 1 solves x=[1], lambda=1: the gap vanishes."""
        data, mask = one_example
        state = DualState.from_alpha(np.ones(1), data, mask, 1.0)
        assert duality_gap(state, data, 1.0) == pytest.approx(0.0, abs=1e-8)

    def test_weak_duality_on_random_points(self, rng):
        """The gap is non-negative for random (alpha, data, lambda)."""
        for _ in range(300):
            data, mask = random_instance(rng, int(rng.integers(1, 15)), int(rng.integers(1, 8)))
            lam = float(10 ** rng.uniform(-3, 1))
            state = DualState.from_alpha(random_alpha(rng, data.n), data, mask, lam)
            assert duality_gap(state, data, lam) >= 0.0

    def test_gap_terms_sum_to_gap(self, rng):
        """The per-example decomposition averages to P - D."""
        data, mask = random_instance(rng, 25, 6)
        lam = 0.1
        state = DualState.from_alpha(random_alpha(rng, data.n), data, mask, lam)
        terms = gap_terms(state.alpha, margins(state.w, data))
        assert terms.mean() == pytest.approx(duality_gap(state, data, lam), abs=1e-12)
        assert np.all(terms >= 0.0)


class TestClampGap:
    """Tests for clamp_gap function."""

    def test_tiny_negative_clamped(self):
        """Values within the floor become 0."""
        assert clamp_gap(-1e-12, 1.0, 1.0) == 0.0

    def test_large_negative_raises(self):
        """Values beyond the floor are an error."""
        with pytest.raises(NegativeGapError):
            clamp_gap(-1e-6, 1.0, 1.0)

    def test_floor_follows_settings(self, monkeypatch):
        """SCSVM_GAP_FLOOR widens the floor."""
        monkeypatch.setenv("SCSVM_GAP_FLOOR", "1e-5")
        assert clamp_gap(-1e-6, 1.0, 1.0) == 0.0


class TestRecoverWeights:
    """Tests for recover_weights function."""

    def test_zero_alpha(self, small_instance):
        """alpha = 0 recovers w = 0."""
        data, mask = small_instance
        model = recover_weights(DualState.zero(data, mask, 0.1), mask, 0.1)
        assert not model.weights.any()

    def test_negated_feature_reported_negative(self):
        """Internal w_h = 0.5 on a negated feature is reported as -0.5."""
        raw = RawDataset(features=np.array([[-1.0]]), labels=np.array([1]))
        data, mask = apply_sign_mask(raw, [], [0])
        state = DualState.from_alpha(np.full(1, 0.5), data, mask, 1.0)
        model = recover_weights(state, mask, 1.0)
        np.testing.assert_allclose(model.w, [0.5])
        np.testing.assert_allclose(model.weights, [-0.5])

    def test_scores_agree_across_spaces(self, rng):
        """Raw-feature scores with reported weights equal internal scores."""
        raw = RawDataset(features=rng.standard_normal((10, 5)), labels=np.array([1, -1] * 5))
        data, mask = apply_sign_mask(raw, [0, 1], [3, 4])
        state = DualState.from_alpha(random_alpha(rng, 10), data, mask, 0.2)
        model = recover_weights(state, mask, 0.2)
        np.testing.assert_allclose(
            model.decision_function(raw.features), model.internal_scores(data.features())
        )
        assert np.all(model.weights[[0, 1]] >= 0.0)
        assert np.all(model.weights[[3, 4]] <= 0.0)
