"""
File: pair_service.py
Description: Service functions for the unconditional independence test of one
             pair: per-sample criterion vectors ψ, their Jacobian at the estimate,
             the sandwich variance of σ̂, the influence samples ξ and the
             two-sided p-value.
"""

import logging

import numpy as np

from disct.core.exceptions import (
    PairKindMismatchError,
    SingularJacobianError,
    VarianceDegenerateError,
)
from disct.schemas.pair_schema import OrthantArgs, PairInference, PairKind, PairTheta
from disct.services.bridge_service import SIGMA_CLAMP, estimate_pair, side_indicator
from disct.utils.normal_kernels import (
    orthant_d_h,
    orthant_d_rho,
    std_normal_pdf,
    std_normal_sf,
    upper_orthant,
)

logger = logging.getLogger(__name__)

JACOBIAN_GUARD = 1e-12


def _orthant_args(theta: PairTheta) -> OrthantArgs:
    return OrthantArgs(h1=theta.h1_hat, h2=theta.h2_hat, rho=theta.sigma_hat)


def psi_samples(
    col_a: np.ndarray, col_b: np.ndarray, theta: PairTheta, kind: PairKind
) -> np.ndarray:
    """Criterion vectors ψ evaluated at θ̂, one row per sample.

    Pair with a discretized side: (joint residual, marginal residual A, marginal
    residual B); a continuous side enters through its split at 0.
    Continuous pair: the correlation criterion x̃ỹ − σ̂(x̃² + ỹ²)/2 on centered columns.
    """
    if theta.kind != kind:
        raise PairKindMismatchError(
            f"theta was estimated for {theta.kind.value}, not {kind.value}"
        )
    col_a = np.asarray(col_a, dtype=np.float64)
    col_b = np.asarray(col_b, dtype=np.float64)

    if kind == PairKind.both_continuous:
        a = col_a - col_a.mean()
        b = col_b - col_b.mean()
        psi = a * b - 0.5 * theta.sigma_hat * (a * a + b * b)
        return psi[:, None]

    kind_a, kind_b = kind.side_kinds()
    ind_a = side_indicator(col_a, kind_a).astype(np.float64)
    ind_b = side_indicator(col_b, kind_b).astype(np.float64)
    joint = ind_a * ind_b - upper_orthant(theta.h1_hat, theta.h2_hat, theta.sigma_hat)
    marg_a = ind_a - std_normal_sf(theta.h1_hat)
    marg_b = ind_b - std_normal_sf(theta.h2_hat)
    return np.column_stack([joint, marg_a, marg_b])


def psi_jacobian(theta: PairTheta, kind: PairKind) -> np.ndarray:
    """Analytic ∂ψ/∂θ at θ̂; it does not depend on the sample.

    Raises SingularJacobianError when σ̂ sits at the clamp and the bridge is flat there.
    """
    if theta.kind != kind:
        raise PairKindMismatchError(
            f"theta was estimated for {theta.kind.value}, not {kind.value}"
        )
    if kind == PairKind.both_continuous:
        return np.array([[-1.0]])

    args = _orthant_args(theta)
    d_sigma = -orthant_d_rho(args)
    at_clamp = abs(theta.sigma_hat) >= 1.0 - SIGMA_CLAMP
    if d_sigma == 0.0 or (at_clamp and abs(d_sigma) < JACOBIAN_GUARD):
        raise SingularJacobianError(
            f"bridge derivative vanishes at sigma={theta.sigma_hat:.6g}, "
            f"h=({theta.h1_hat:.4g}, {theta.h2_hat:.4g})"
        )
    return np.array(
        [
            [d_sigma, -orthant_d_h(args, 1), -orthant_d_h(args, 2)],
            [0.0, std_normal_pdf(theta.h1_hat), 0.0],
            [0.0, 0.0, std_normal_pdf(theta.h2_hat)],
        ]
    )


def _check_invertible(jacobian: np.ndarray) -> None:
    # Numerical rank uses the SVD tolerance relative to the largest singular value.
    if not np.all(np.isfinite(jacobian)) or np.linalg.matrix_rank(jacobian) < jacobian.shape[0]:
        raise SingularJacobianError("criterion Jacobian is singular")


def influence_samples(psi: np.ndarray, jacobian: np.ndarray) -> np.ndarray:
    """ξˡ = first component of −J⁻¹ψˡ for every sample l."""
    psi = np.asarray(psi, dtype=np.float64)
    if psi.ndim == 1:
        psi = psi[:, None]
    _check_invertible(jacobian)
    solved = np.linalg.solve(jacobian, psi.T)
    return -solved[0]


def sandwich_variance(psi: np.ndarray, jacobian: np.ndarray) -> float:
    """(1/n)·(J⁻¹ M J⁻ᵀ)₁₁ with M = Eₙ[ψψᵀ]."""
    n = psi.shape[0]
    _check_invertible(jacobian)
    meat = psi.T @ psi / n
    bread = np.linalg.inv(jacobian)
    return float((bread @ meat @ bread.T)[0, 0] / n)


def two_sided_p_value(z: float) -> float:
    return min(1.0, 2.0 * std_normal_sf(abs(z)))


def independence_test(
    col_a: np.ndarray, col_b: np.ndarray, kind: PairKind, alpha: float = 0.05
) -> PairInference:
    """Test σ = 0 for one pair with the sandwich null variance."""
    theta = estimate_pair(col_a, col_b, kind)
    psi = psi_samples(col_a, col_b, theta, kind)
    jacobian = psi_jacobian(theta, kind)
    xi = influence_samples(psi, jacobian)
    variance = sandwich_variance(psi, jacobian)
    if not variance > 0.0:
        raise VarianceDegenerateError("null variance of sigma_hat is zero")

    z = theta.sigma_hat / np.sqrt(variance)
    p_value = two_sided_p_value(z)
    logger.debug(
        "Pair test %s: sigma=%.5f var=%.3g z=%.3f p=%.4g",
        kind.value,
        theta.sigma_hat,
        variance,
        z,
        p_value,
    )
    return PairInference(
        theta=theta, xi=xi, variance=variance, z=float(z), p_value=p_value, alpha=alpha
    )
