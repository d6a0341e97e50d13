"""
File: ci_service.py
Description: Service functions for the discretization-aware conditional
             independence test. Assembles the latent correlation matrix of the
             tested pair plus conditioning set, runs the nodewise regression of the
             first variable on the rest, and propagates the pairwise influence
             samples into the variance of the tested regression coefficient.
"""

import logging
from typing import List, Sequence, Tuple

import numpy as np
from sentry_sdk import capture_message

from disct.core.exceptions import (
    DisctError,
    InvalidConditioningSetError,
    PairEstimationError,
    SingularCovarianceError,
    VarianceDegenerateError,
)
from disct.schemas.ci_schema import CiResult, CovModel
from disct.schemas.data_schema import DataMatrix
from disct.schemas.pair_schema import PairKind
from disct.services.bridge_service import estimate_pair, pair_kind_of
from disct.services.pair_service import (
    independence_test,
    influence_samples,
    psi_jacobian,
    psi_samples,
    two_sided_p_value,
)

logger = logging.getLogger(__name__)

EIGEN_FLOOR = 1e-6
SINGULAR_FLOOR = 1e-8


def repair_pd(matrix: np.ndarray) -> Tuple[np.ndarray, bool]:
    """Clip eigenvalues at EIGEN_FLOOR and restore the unit diagonal.

    Returns the input unchanged (and False) when it is already positive definite
    at that floor.
    """
    sym = (matrix + matrix.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(sym)
    if eigvals.min() >= EIGEN_FLOOR:
        return sym, False
    rebuilt = (eigvecs * np.maximum(eigvals, EIGEN_FLOOR)) @ eigvecs.T
    scale = np.sqrt(np.diag(rebuilt))
    rebuilt = rebuilt / np.outer(scale, scale)
    np.fill_diagonal(rebuilt, 1.0)
    return (rebuilt + rebuilt.T) / 2.0, True


def assemble_cov(data: DataMatrix, subset: Sequence[int]) -> CovModel:
    """Estimate every pairwise latent correlation of `subset` with its influence samples."""
    subset = [int(c) for c in subset]
    if len(subset) < 2 or len(set(subset)) != len(subset):
        raise InvalidConditioningSetError(
            f"subset must hold at least 2 distinct columns, got {subset}"
        )
    if min(subset) < 0 or max(subset) >= data.p:
        raise InvalidConditioningSetError(f"subset {subset} out of range for p={data.p}")

    p, n = len(subset), data.n
    sigma = np.eye(p)
    xi = np.zeros((p, p, n))
    kinds: List[List[PairKind | None]] = [[None] * p for _ in range(p)]

    for q in range(p):
        for k in range(q + 1, p):
            a, b = subset[q], subset[k]
            kind = pair_kind_of(data.kinds[a], data.kinds[b])
            col_a, col_b = data.column(a), data.column(b)
            try:
                theta = estimate_pair(col_a, col_b, kind)
                psi = psi_samples(col_a, col_b, theta, kind)
                xi_qk = influence_samples(psi, psi_jacobian(theta, kind))
            except DisctError as e:
                raise PairEstimationError(e.detail, (a, b)) from e
            sigma[q, k] = sigma[k, q] = theta.sigma_hat
            xi[q, k] = xi[k, q] = xi_qk
            kinds[q][k] = kinds[k][q] = kind

    sigma_pd, repaired = repair_pd(sigma)
    if repaired:
        logger.warning("Latent correlation of columns %s was not PD; eigenvalues clipped", subset)
        capture_message(f"PD repair applied to columns {subset}", level="warning")

    return CovModel(
        columns=subset,
        sigma_hat=sigma,
        sigma_pd=sigma_pd,
        xi=xi,
        pair_kinds=kinds,
        pd_repaired=repaired,
    )


def _others(cov: CovModel, j: int) -> List[int]:
    return [q for q in range(cov.p) if q != j]


def _regressor_block(cov: CovModel, j: int) -> np.ndarray:
    others = _others(cov, j)
    block = cov.sigma_pd[np.ix_(others, others)]
    if np.linalg.eigvalsh(block).min() < SINGULAR_FLOOR:
        raise SingularCovarianceError(
            f"correlation block without row {j} is singular after repair"
        )
    return block


def nodewise_beta(cov: CovModel, j: int) -> np.ndarray:
    """β̂_j = Σ̂_{-j,-j}⁻¹ Σ̂_{-j,j}: regression of variable j on the rest."""
    block = _regressor_block(cov, j)
    return np.linalg.solve(block, cov.sigma_pd[_others(cov, j), j])


def ci_projection_vector(
    cov: CovModel, j: int, k: int, beta_hat_j: np.ndarray
) -> np.ndarray:
    """Weight vector a^{[k]} = [−u ; vec(u β̃ᵀ)].

    u is the row of Σ̂_{-j,-j}⁻¹ belonging to k and β̃ is β̂_j with its k-entry
    set to zero (the null plug-in). vec is row-wise.
    """
    others = _others(cov, j)
    pos = others.index(k)
    u = np.linalg.inv(_regressor_block(cov, j))[pos]
    beta_tilde = np.array(beta_hat_j, dtype=np.float64, copy=True)
    beta_tilde[pos] = 0.0
    return np.concatenate([-u, np.outer(u, beta_tilde).ravel()])


def stacked_influence(cov: CovModel, j: int) -> np.ndarray:
    """Rows vec(Bˡ): Ξˡ_{-j,j} followed by the row-wise Ξˡ_{-j,-j}, one row per sample."""
    others = _others(cov, j)
    v = cov.xi[others, j, :].T
    y = cov.xi[np.ix_(others, others)].transpose(2, 0, 1).reshape(cov.n, -1)
    return np.hstack([v, y])


def ci_variance(cov: CovModel, j: int, k: int, beta_hat_j: np.ndarray) -> float:
    """Null variance of β̂_{j,k}: (1/n²) Σ_l (aᵀ vec(Bˡ))², one scalar per sample."""
    others = _others(cov, j)
    m = len(others)
    a = ci_projection_vector(cov, j, k, beta_hat_j)
    a_v, a_y = a[:m], a[m:].reshape(m, m)

    v = cov.xi[others, j, :]
    y = cov.xi[np.ix_(others, others)]
    projection = a_v @ v + np.einsum("mq,mqn->n", a_y, y)
    return float(np.sum(projection * projection) / cov.n**2)


def _validate_indices(data: DataMatrix, i: int, j: int, cond_set: Sequence[int]) -> None:
    involved = [i, j, *cond_set]
    if i == j:
        raise InvalidConditioningSetError("tested variables must differ")
    if len(set(involved)) != len(involved):
        raise InvalidConditioningSetError(
            f"conditioning set {list(cond_set)} overlaps the tested pair or repeats"
        )
    if min(involved) < 0 or max(involved) >= data.p:
        raise InvalidConditioningSetError(f"indices {involved} out of range for p={data.p}")


def dct_test(
    data: DataMatrix,
    i: int,
    j: int,
    cond_set: Sequence[int] = (),
    alpha: float = 0.05,
) -> CiResult:
    """Test X_i ⊥ X_j | X_S on the latent scale."""
    cond_set = [int(c) for c in cond_set]
    _validate_indices(data, i, j, cond_set)

    if not cond_set:
        kind = pair_kind_of(data.kinds[i], data.kinds[j])
        pair = independence_test(data.column(i), data.column(j), kind, alpha)
        return CiResult(
            i=i,
            j=j,
            beta_hat=pair.theta.sigma_hat,
            variance=pair.variance,
            z=pair.z,
            p_value=pair.p_value,
            alpha=alpha,
        )

    cov = assemble_cov(data, [i, j, *cond_set])
    beta = nodewise_beta(cov, 0)
    beta_hat = float(beta[0])
    variance = ci_variance(cov, 0, 1, beta)
    if not variance > 0.0:
        raise VarianceDegenerateError(f"null variance of beta for ({i}, {j} | {cond_set}) is zero")

    z = beta_hat / np.sqrt(variance)
    result = CiResult(
        i=i,
        j=j,
        cond_set=cond_set,
        beta_hat=beta_hat,
        variance=variance,
        z=float(z),
        p_value=two_sided_p_value(z),
        alpha=alpha,
        pd_repaired=cov.pd_repaired,
    )
    logger.debug(
        "DCT %d~%d | %s: beta=%.5f var=%.3g p=%.4g",
        i,
        j,
        cond_set,
        beta_hat,
        variance,
        result.p_value,
    )
    return result
