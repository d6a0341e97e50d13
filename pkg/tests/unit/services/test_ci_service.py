import numpy as np
import pytest

from disct.core.exceptions import (
    InvalidConditioningSetError,
    PairEstimationError,
    SingularCovarianceError,
    SingularJacobianError,
)
from disct.schemas.ci_schema import CovModel
from disct.schemas.data_schema import ColumnKind
from disct.services.bridge_service import SIGMA_CLAMP, pair_kind_of
from disct.services.ci_service import (
    assemble_cov,
    ci_projection_vector,
    ci_variance,
    dct_test,
    nodewise_beta,
    repair_pd,
    stacked_influence,
)
from disct.services.data_service import build_data_matrix
from disct.services.pair_service import independence_test
from tests.conftest import binarize, make_pair_data

CHAIN_SIGMA = np.array([[1.0, 0.5, 0.25], [0.5, 1.0, 0.5], [0.25, 0.5, 1.0]])


def _cov(sigma, xi=None, n=5):
    p = sigma.shape[0]
    return CovModel(
        columns=list(range(p)),
        sigma_hat=sigma,
        sigma_pd=sigma,
        xi=np.zeros((p, p, n)) if xi is None else xi,
        pair_kinds=[[None] * p for _ in range(p)],
    )


def _random_xi(p, n, seed):
    rng = np.random.default_rng(seed)
    xi = rng.standard_normal((p, p, n))
    xi = (xi + xi.transpose(1, 0, 2)) / 2
    for q in range(p):
        xi[q, q] = 0.0
    return xi


def _sem_table(n, seed, collider, cut=0.0):
    """Y, W and a binarized Z on a chain Y → Z → W or a collider Y → Z ← W."""
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(n)
    if collider:
        w = rng.standard_normal(n)
        z = y + w + rng.standard_normal(n)
    else:
        z = y + rng.standard_normal(n)
        w = z + rng.standard_normal(n)
    values = np.column_stack([y, w, binarize(z, cut)])
    kinds = [ColumnKind.continuous, ColumnKind.continuous, ColumnKind.discretized]
    return build_data_matrix(values, kinds, ["Y", "W", "Z"])


def test_nodewise_beta_on_identity():
    np.testing.assert_allclose(nodewise_beta(_cov(np.eye(3)), 0), [0.0, 0.0])


def test_nodewise_beta_on_chain():
    # X0 ⊥ X2 | X1 on the chain X0 - X1 - X2.
    np.testing.assert_allclose(nodewise_beta(_cov(CHAIN_SIGMA), 0), [0.5, 0.0], atol=1e-12)


def test_nodewise_beta_singular_block():
    sigma = np.ones((3, 3))
    with pytest.raises(SingularCovarianceError):
        nodewise_beta(_cov(sigma), 0)


def test_zero_influence_gives_zero_variance():
    cov = _cov(CHAIN_SIGMA)
    assert ci_variance(cov, 0, 1, nodewise_beta(cov, 0)) == 0.0


def test_projection_vector_layout():
    cov = _cov(CHAIN_SIGMA)
    a = ci_projection_vector(cov, 0, 1, nodewise_beta(cov, 0))
    # m = 2 regressors: m entries for Ξ_{-j,j} plus m² for Ξ_{-j,-j}.
    assert a.shape == (6,)
    np.testing.assert_allclose(a[:2], -np.linalg.inv(CHAIN_SIGMA[1:, 1:])[0])


def test_variance_matches_explicit_projection():
    rng = np.random.default_rng(5)
    latent = rng.standard_normal((200, 4)) @ rng.standard_normal((4, 4))
    sigma = np.corrcoef(latent, rowvar=False)
    np.fill_diagonal(sigma, 1.0)
    sigma = (sigma + sigma.T) / 2
    cov = _cov(sigma, _random_xi(4, 50, seed=6), n=50)
    beta = nodewise_beta(cov, 0)

    a = ci_projection_vector(cov, 0, 2, beta)
    stacked = stacked_influence(cov, 0)
    expected = np.sum((stacked @ a) ** 2) / 50**2
    assert ci_variance(cov, 0, 2, beta) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("discrete", [(True, True), (False, True), (True, False), (False, False)])
def test_two_variable_case_reduces_to_pair_test(discrete):
    data = make_pair_data(600, 0.3, seed=12, discrete=discrete)
    cov = assemble_cov(data, [0, 1])
    beta = nodewise_beta(cov, 0)
    kind = pair_kind_of(data.kinds[0], data.kinds[1])
    pair = independence_test(data.column(0), data.column(1), kind)

    assert beta[0] == pytest.approx(pair.theta.sigma_hat)
    assert ci_variance(cov, 0, 1, beta) == pytest.approx(pair.variance, rel=1e-10)


def test_assemble_cov_shapes(mixed_table):
    cov = assemble_cov(mixed_table, [3, 0, 2])
    assert cov.columns == [3, 0, 2]
    assert cov.sigma_hat.shape == (3, 3)
    assert cov.xi.shape == (3, 3, 400)
    np.testing.assert_array_equal(np.diag(cov.sigma_hat), 1.0)
    np.testing.assert_array_equal(cov.xi[1, 1], 0.0)
    assert cov.pair_kinds[0][1] is not None


def test_assemble_cov_identical_columns_clamp():
    x = np.random.default_rng(1).standard_normal(300)
    data = build_data_matrix(
        np.column_stack([x, x]), [ColumnKind.continuous, ColumnKind.continuous], ["A", "B"]
    )
    cov = assemble_cov(data, [0, 1])
    assert cov.sigma_hat[0, 1] == pytest.approx(1.0 - SIGMA_CLAMP)


@pytest.mark.parametrize("subset", [[0], [1, 1], [0, 9], [-1, 0]])
def test_assemble_cov_rejects_bad_subsets(mixed_table, subset):
    with pytest.raises(InvalidConditioningSetError):
        assemble_cov(mixed_table, subset)


def test_assemble_cov_annotates_failing_pair(mixed_table, mocker):
    mocker.patch(
        "disct.services.ci_service.estimate_pair",
        side_effect=SingularJacobianError("bridge derivative vanishes"),
    )
    with pytest.raises(PairEstimationError) as exc:
        assemble_cov(mixed_table, [2, 3])
    assert exc.value.pair == (2, 3)


def test_repair_pd_leaves_pd_input_alone():
    repaired, flag = repair_pd(CHAIN_SIGMA)
    assert not flag
    np.testing.assert_array_equal(repaired, CHAIN_SIGMA)


def test_repair_pd_fixes_indefinite_matrix():
    bad = np.array([[1.0, 0.9, 0.9], [0.9, 1.0, -0.9], [0.9, -0.9, 1.0]])
    assert np.linalg.eigvalsh(bad).min() < 0
    repaired, flag = repair_pd(bad)
    assert flag
    np.testing.assert_allclose(np.diag(repaired), 1.0)
    np.testing.assert_allclose(repaired, repaired.T)
    assert np.linalg.eigvalsh(repaired).min() > 0


@pytest.mark.parametrize(
    "i, j, cond_set",
    [(0, 0, []), (0, 1, [1]), (0, 1, [2, 2]), (0, 1, [7]), (0, 5, [])],
)
def test_dct_rejects_invalid_indices(mixed_table, i, j, cond_set):
    with pytest.raises(InvalidConditioningSetError):
        dct_test(mixed_table, i, j, cond_set)


def test_dct_without_conditioning_is_the_pair_test():
    data = make_pair_data(500, 0.2, seed=3, discrete=(True, False))
    result = dct_test(data, 0, 1)
    pair = independence_test(data.column(0), data.column(1), pair_kind_of(*data.kinds))
    assert result.cond_set == []
    assert result.beta_hat == pair.theta.sigma_hat
    assert result.p_value == pytest.approx(pair.p_value)


def test_dct_on_mixed_table(mixed_table):
    result = dct_test(mixed_table, 0, 1, [2, 3], alpha=0.1)
    assert result.cond_set == [2, 3]
    assert 0.0 <= result.p_value <= 1.0
    assert result.variance > 0.0
    assert result.alpha == 0.1


def test_dct_detects_collider_dependence():
    data = _sem_table(2000, seed=7, collider=True)
    result = dct_test(data, 0, 1, [2])
    assert result.beta_hat < 0
    assert result.p_value < 1e-4


@pytest.mark.slow
def test_dct_keeps_level_on_binarized_chain():
    rejections = sum(
        not dct_test(_sem_table(2000, seed=seed, collider=False), 0, 1, [2]).independent
        for seed in range(500)
    )
    assert abs(rejections / 500 - 0.05) <= 0.03


@pytest.mark.slow
def test_dct_level_with_larger_conditioning_set():
    rejections = 0
    for seed in range(500):
        rng = np.random.default_rng(1000 + seed)
        z = rng.standard_normal((2000, 3))
        y = z.sum(axis=1) * 0.5 + rng.standard_normal(2000)
        w = z @ np.array([0.7, -0.4, 0.9]) + rng.standard_normal(2000)
        values = np.column_stack([y, w, *(binarize(z[:, d], 0.2 * d) for d in range(3))])
        kinds = [ColumnKind.continuous] * 2 + [ColumnKind.discretized] * 3
        data = build_data_matrix(values, kinds)
        rejections += not dct_test(data, 0, 1, [2, 3, 4]).independent
    assert abs(rejections / 500 - 0.05) <= 0.03


@pytest.mark.slow
def test_ci_variance_matches_monte_carlo_spread():
    betas, reported = [], []
    for seed in range(300):
        result = dct_test(_sem_table(3000, seed=5000 + seed, collider=False), 0, 1, [2])
        betas.append(result.beta_hat)
        reported.append(np.sqrt(result.variance))
    assert np.std(betas) == pytest.approx(np.median(reported), rel=0.15)


def _sparse_precision(p, rng):
    upper = np.triu(rng.random((p, p)) < 0.3, k=1)
    signs = rng.choice([-1.0, 1.0], size=(p, p))
    off = np.where(upper, signs * rng.uniform(0.2, 0.6, size=(p, p)), 0.0)
    off = off + off.T
    return off + np.diag(np.abs(off).sum(axis=1) + 0.5)


@pytest.mark.parametrize("seed", range(50))
def test_nodewise_beta_zeros_follow_the_precision_pattern(seed):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(3, 9))
    omega = _sparse_precision(p, rng)
    sigma = np.linalg.inv(omega)
    scale = 1.0 / np.sqrt(np.diag(sigma))
    corr = sigma * np.outer(scale, scale)
    np.fill_diagonal(corr, 1.0)
    cov = _cov(corr)

    for j in range(p):
        beta = nodewise_beta(cov, j)
        others = [q for q in range(p) if q != j]
        for k, q in enumerate(others):
            assert (abs(beta[k]) <= 1e-8) == (omega[j, q] == 0.0)


@pytest.mark.slow
def test_dct_decision_does_not_depend_on_role_order():
    agree = 0
    for seed in range(200):
        data = _sem_table(2000, seed=9000 + seed, collider=False)
        forward = dct_test(data, 0, 1, [2]).independent
        backward = dct_test(data, 1, 0, [2]).independent
        agree += forward == backward
    assert agree / 200 >= 0.95
