"""Long-running solver acceptance checks."""
import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

from scsvm.models import DualState, SignMask
from scsvm.services.data_io import load_similarity
from scsvm.services.evaluation import compare_sign_constraints, default_lambda_grid, summarize
from scsvm.services.fw_solver import FwConfig, fw_train
from scsvm.services.objectives import duality_gap, primal_value
from scsvm.services.oracles import OracleConfig, unconstrained_reference
from scsvm.services.pg_solver import PgConfig, full_schedule, pg_bound, pg_train
from scsvm.services.synthetic import (
    digits_problem,
    random_alpha,
    random_instance,
    two_blob_similarity,
)
from scsvm.services.verification import CheckName, run_checks

pytestmark = pytest.mark.slow


class TestOracleChecks:
    """Tests for the verify suite at full instance counts."""

    def test_line_search_exact(self):
        """Exact line search matches a 1e5-point grid to 1e-8 on 500 instances."""
        result = run_checks(seed=11, checks=[CheckName.LINE_SEARCH], instances=500)[0]
        assert result.passed, result.describe()
        assert result.metrics["pairs"] >= 10_000

    def test_lmo_exhaustive(self):
        """The closed-form LMO is optimal over every corner for n up to 16."""
        result = run_checks(seed=12, checks=[CheckName.LMO], instances=100)[0]
        assert result.passed, result.describe()

    def test_fw_rate(self):
        """D* - D stays under 2 R^2 / (lambda (T + 2)) for T <= 500."""
        result = run_checks(seed=13, checks=[CheckName.RATE], instances=20)[0]
        assert result.passed, result.describe()
        assert result.metrics["bound"] == 1998

    def test_pg_bound(self):
        """Best PG error stays under its log T / T bound at T = 100 and 1000."""
        config = OracleConfig(reference_iters=20_000)
        result = run_checks(seed=14, checks=[CheckName.PG_BOUND], instances=20, config=config)[0]
        assert result.passed, result.describe()


class TestUnconstrainedAgreement:
    """Tests for the sigma = 0 reduction to the ordinary linear SVM."""

    @pytest.mark.parametrize("lam", [1e-2, 1e-1, 1.0])
    def test_solvers_agree(self, rng, lam):
        """FW matches liblinear to 1e-4 relative and PG stays within its bound."""
        data, _ = random_instance(rng, 60, 6, constrained_fraction=0.0)
        mask = SignMask.unconstrained(6)
        fw = fw_train(data, mask, FwConfig(lam=lam, epsilon=1e-9, max_iter=200_000))
        reference = primal_value(unconstrained_reference(data, lam), data, lam)
        assert fw.primal == pytest.approx(reference, rel=1e-4)

        horizon = 5000
        cfg = PgConfig(lam=lam, max_iter=horizon, eval_schedule=full_schedule(horizon))
        pg = pg_train(data, mask, cfg)
        assert pg.best_primal - fw.primal <= pg_bound(lam, data.R, horizon)
        assert pg.best_primal >= fw.dual - 1e-12


class TestFeasibility:
    """Tests for sign feasibility and the weight norm of trained models."""

    @pytest.mark.parametrize("seed", range(5))
    def test_trained_models(self, seed):
        """sigma * w >= 0 exactly and ||w|| <= sqrt(2 / lambda) for both solvers."""
        rng = np.random.default_rng(seed)
        data, mask = random_instance(rng, 50, 12)
        for lam in (1e-3, 1e-1, 10.0):
            radius = math.sqrt(2.0 / lam) * (1.0 + 1e-10)
            fw = fw_train(data, mask, FwConfig(lam=lam, max_iter=300)).model
            pg = pg_train(data, mask, PgConfig(lam=lam, max_iter=300)).model
            for model in (fw, pg):
                assert np.all(mask.sigma * model.w >= 0.0)
                assert np.linalg.norm(model.w) <= radius


class TestWeakDuality:
    """Tests for the sign of the duality gap at random dual points."""

    def test_ten_thousand_points(self):
        """P(w(alpha)) - D(alpha) >= 0 for 10,000 random (alpha, data, lambda) triples."""
        rng = np.random.default_rng(21)
        for _ in range(10_000):
            data, mask = random_instance(rng, int(rng.integers(1, 15)), int(rng.integers(1, 8)))
            lam = float(10 ** rng.uniform(-3, 1))
            state = DualState.from_alpha(random_alpha(rng, data.n), data, mask, lam)
            assert duality_gap(state, data, lam) >= 0.0


class TestDigitsConvergence:
    """Tests for FW duality gaps on the bundled digits."""

    @pytest.mark.parametrize("c", [1.0, 1e2])
    def test_certified(self, c):
        """Moderate lambda = c / n reaches a certified gap of 1e-4 within 1000 iterations."""
        data, mask = digits_problem()
        result = fw_train(data, mask, FwConfig(lam=c / data.n, epsilon=1e-4, max_iter=1000))
        assert result.certified
        assert result.gap <= 1e-4
        assert result.trace[-1].gap == result.gap

    @pytest.mark.parametrize("c", [1e-6, 1e-4, 1e-2])
    def test_small_lambda_gap_halves(self, c):
        """Tiny lambda converges slowly: D never decreases and the gap at least halves."""
        data, mask = digits_problem()
        result = fw_train(data, mask, FwConfig(lam=c / data.n, epsilon=1e-4, max_iter=1000))
        duals = [r.dual for r in result.trace]
        assert all(b >= a - 1e-12 for a, b in zip(duals, duals[1:]))
        gaps = [r.gap for r in result.trace]
        assert gaps[0] == pytest.approx(1.0)
        assert all(g >= 0.0 and math.isfinite(g) for g in gaps)
        assert gaps[-1] <= 0.5 * gaps[0]


class TestPairwiseDirection:
    """Tests for the sign-constrained SVM-pairwise comparison."""

    def test_constraints_do_not_hurt(self):
        """Over ten seeds the constrained mean AUC is within 0.02 of the unconstrained one."""
        constrained, unconstrained = [], []
        for seed in range(10):
            sim = two_blob_similarity(np.random.default_rng(seed), 30, 30, separation=1.0)
            comparison = compare_sign_constraints(
                sim, default_lambda_grid(30), repeats=1, seed=seed, k=3
            )
            constrained.append(comparison.constrained[0].auc)
            unconstrained.append(comparison.unconstrained[0].auc)
        assert summarize(constrained)[0] >= summarize(unconstrained)[0] - 0.02

    @pytest.mark.yeast
    @pytest.mark.skipif(not os.environ.get("SCSVM_YEAST_DIR"), reason="SCSVM_YEAST_DIR not set")
    def test_yeast_class_12(self):
        """Class 12 of the yeast benchmark reaches AUC 0.905 +/- 0.03 with constraints."""
        root = Path(os.environ["SCSVM_YEAST_DIR"])
        sim = load_similarity(root / "similarity.csv", root / "labels_class12.txt")
        comparison = compare_sign_constraints(sim, default_lambda_grid((sim.n + 1) // 2))
        mean, _ = comparison.summary()["constrained"]
        assert mean == pytest.approx(0.905, abs=0.03)


class TestScaling:
    """Tests for the per-iteration cost of FW."""

    def _seconds_per_iteration(self, n, d=200, iterations=40, repeats=3):
        data, mask = random_instance(np.random.default_rng(n), n, d)
        cfg = FwConfig(lam=1e-3, epsilon=1e-15, max_iter=iterations)
        best = math.inf
        for _ in range(repeats):
            start = time.perf_counter()
            fw_train(data, mask, cfg)
            best = min(best, time.perf_counter() - start)
        return best / iterations

    def test_doubling_n(self):
        """Doubling n at fixed d at most triples the time per iteration."""
        small = self._seconds_per_iteration(4000)
        large = self._seconds_per_iteration(8000)
        assert large <= 3.0 * small
