import numpy as np
import pytest

from loadshare import (
    InvalidParams,
    ModelKind,
    ModelSpec,
    OracleConfig,
    Params,
    RngState,
    SpacingsMatrix,
    closed_form_mle,
    crosscheck,
    finite_difference_gradient,
    numeric_mle,
    random_instances,
    sample_dataset,
    score,
)
from loadshare.errors import NoConvergence


class TestOracleConfig:
    def test_defaults(self):
        cfg = OracleConfig()
        assert cfg.max_iters == 200 and cfg.tol == 1e-10 and cfg.bracket_expand == 4.0

    @pytest.mark.parametrize(
        "kwargs",
        [{"max_iters": 0}, {"tol": 0.0}, {"tol": -1e-3}, {"bracket_expand": 1.0}],
    )
    def test_validation(self, kwargs):
        with pytest.raises(InvalidParams):
            OracleConfig(**kwargs)


class TestNumericMle:
    def test_kim_kvam_unit_spacings(self):
        fit = numeric_mle(ModelSpec.kim_kvam(2), SpacingsMatrix([[1.0, 1.0]]))
        assert fit.params_hat.theta == pytest.approx(0.5, rel=1e-6)
        assert fit.params_hat.lambdas[0] == pytest.approx(2.0, rel=1e-6)
        assert fit.diagnostics["sweeps"] >= 1

    def test_ssk_unit_spacings(self):
        fit = numeric_mle(ModelSpec.ssk(3, 2), SpacingsMatrix([[1.0, 1.0, 1.0]]))
        assert fit.params_hat.theta == pytest.approx(1 / 3, rel=1e-6)
        assert fit.params_hat.lambdas == pytest.approx((1.5, 6.0), rel=1e-6)

    def test_never_exceeds_closed_form_likelihood(self):
        for kind, seed in ((ModelKind.KIM_KVAM, 4), (ModelKind.SSK, 5)):
            for spec, _, data in random_instances(kind, 6, seed):
                numeric = numeric_mle(spec, data)
                closed = closed_form_mle(spec, data)
                assert numeric.loglik_at_mle <= closed.loglik_at_mle + 1e-9

    def test_no_convergence_reported(self):
        spec, _, data = random_instances(ModelKind.KIM_KVAM, 1, 0)[0]
        with pytest.raises(NoConvergence):
            numeric_mle(spec, data, OracleConfig(max_iters=1))

    def test_converges_on_default_validation_sets(self):
        # small slice here; the full 50-instance sets run in the acceptance suite
        for kind, seed in ((ModelKind.KIM_KVAM, 1), (ModelKind.SSK, 1)):
            for spec, _, data in random_instances(kind, 8, seed):
                fit = numeric_mle(spec, data)
                assert fit.diagnostics["sweeps"] <= OracleConfig().max_iters


class TestCrosscheck:
    def test_closed_and_numeric_agree(self):
        for kind, seed in ((ModelKind.KIM_KVAM, 2), (ModelKind.SSK, 3)):
            for spec, _, data in random_instances(kind, 5, seed):
                result = crosscheck(spec, data)
                assert result.max_param_rel_discrepancy <= 1e-6
                assert result.loglik_gap <= 1e-9
                assert result.ok

    def test_single_dataset_example(self):
        result = crosscheck(ModelSpec.kim_kvam(2), SpacingsMatrix([[1.0, 1.0]]))
        assert result.max_param_rel_discrepancy <= 1e-6


class TestFiniteDifferenceGradient:
    def test_hand_value(self):
        g = finite_difference_gradient(
            ModelSpec.kim_kvam(2), Params(1.0, (1.0,)), SpacingsMatrix([[1.0, 1.0]]), 1e-6
        )
        assert g == pytest.approx([-1.0, 0.0], abs=1e-8)

    def test_matches_analytic_score_at_random_points(self):
        for kind, seed in ((ModelKind.KIM_KVAM, 6), (ModelKind.SSK, 7)):
            for spec, truth, data in random_instances(kind, 10, seed):
                analytic = score(spec, truth, data)
                fd = finite_difference_gradient(spec, truth, data, 1e-6)
                rel = np.abs(fd - analytic) / np.maximum(1.0, np.abs(analytic))
                assert np.max(rel) <= 1e-5

    def test_near_zero_at_closed_form_mle(self):
        data = SpacingsMatrix([[0.6, 1.4], [1.1, 0.5], [0.9, 1.2]])
        spec = ModelSpec.kim_kvam(2)
        fit = closed_form_mle(spec, data)
        fd = finite_difference_gradient(spec, fit.params_hat, data, 1e-6)
        assert np.max(np.abs(fd)) <= 1e-6

    def test_step_leaving_positive_orthant(self):
        with pytest.raises(InvalidParams):
            finite_difference_gradient(
                ModelSpec.kim_kvam(2), Params(0.5, (1.0,)), SpacingsMatrix([[1.0, 1.0]]), 0.9
            )

    def test_step_must_be_positive(self):
        with pytest.raises(InvalidParams):
            finite_difference_gradient(
                ModelSpec.kim_kvam(2), Params(1.0, (1.0,)), SpacingsMatrix([[1.0, 1.0]]), 0.0
            )


class TestRandomInstances:
    def test_deterministic(self):
        a = random_instances(ModelKind.SSK, 4, 9)
        b = random_instances(ModelKind.SSK, 4, 9)
        for (spec_a, truth_a, data_a), (spec_b, truth_b, data_b) in zip(a, b):
            assert spec_a == spec_b and truth_a == truth_b
            assert np.array_equal(data_a.data, data_b.data)

    def test_respects_structural_bounds(self):
        for spec, truth, data in random_instances(ModelKind.SSK, 30, 11):
            assert 3 <= spec.k <= 6 and 2 <= spec.s <= spec.k - 1
            assert 1 <= data.n <= 20
            for v in (truth.theta, *truth.lambdas):
                assert 0.1 <= v <= 10.0
        for spec, _, _ in random_instances(ModelKind.KIM_KVAM, 30, 11):
            assert 2 <= spec.k <= 6 and spec.s is None
