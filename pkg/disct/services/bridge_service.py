"""
File: bridge_service.py
Description: Service functions for recovering the latent correlation of one
             variable pair. Discretized sides are binarized at their sample mean,
             their latent boundary is estimated from the exceedance rate, and the
             joint exceedance rate is inverted through the bivariate normal
             upper-orthant probability.
"""

import logging

import numpy as np
from scipy import optimize

from disct.core.exceptions import DegenerateColumnError, PairKindMismatchError
from disct.schemas.data_schema import ColumnKind
from disct.schemas.pair_schema import PairKind, PairTheta
from disct.utils.normal_kernels import std_normal_quantile, upper_orthant

logger = logging.getLogger(__name__)

SIGMA_CLAMP = 1e-6
_SIGMA_LO = -1.0 + SIGMA_CLAMP
_SIGMA_HI = 1.0 - SIGMA_CLAMP


def pair_kind_of(kind_a: ColumnKind, kind_b: ColumnKind) -> PairKind:
    """Derive the bridge case from the kinds of the two columns."""
    a_disc = kind_a == ColumnKind.discretized
    b_disc = kind_b == ColumnKind.discretized
    if a_disc and b_disc:
        return PairKind.both_discrete
    if a_disc:
        return PairKind.mixed_discrete_first
    if b_disc:
        return PairKind.mixed_continuous_first
    return PairKind.both_continuous


def clamp_sigma(sigma: float) -> float:
    return min(max(sigma, _SIGMA_LO), _SIGMA_HI)


def exceedance(column: np.ndarray) -> np.ndarray:
    """Indicator of entries strictly above the column's sample mean."""
    column = np.asarray(column, dtype=np.float64)
    return column > column.mean()


def estimate_tau_single(column: np.ndarray) -> float:
    """Fraction of entries strictly greater than the sample mean."""
    return float(np.mean(exceedance(column)))


def estimate_h(tau_hat: float, n: int) -> float:
    """Latent boundary ĥ = Φ⁻¹(1 − τ̃) with τ̃ clamped to [1/(2n), 1 − 1/(2n)]."""
    lo = 1.0 / (2.0 * n)
    tau = min(max(tau_hat, lo), 1.0 - lo)
    return std_normal_quantile(1.0 - tau)


def side_indicator(column: np.ndarray, kind: ColumnKind) -> np.ndarray:
    # Standardized continuous sides are split at 0, discretized sides at their mean.
    if kind == ColumnKind.discretized:
        return exceedance(column)
    return np.asarray(column, dtype=np.float64) > 0.0


def joint_indicator(col_a: np.ndarray, col_b: np.ndarray, kind: PairKind) -> np.ndarray:
    kind_a, kind_b = kind.side_kinds()
    return side_indicator(col_a, kind_a) & side_indicator(col_b, kind_b)


def estimate_tau_pair(col_a: np.ndarray, col_b: np.ndarray, kind: PairKind) -> float:
    """Joint exceedance frequency of a pair with at least one discretized side."""
    if kind == PairKind.both_continuous:
        raise PairKindMismatchError("joint exceedance is undefined for a continuous pair")
    if len(col_a) != len(col_b):
        raise PairKindMismatchError("columns must have equal length")
    return float(np.mean(joint_indicator(col_a, col_b, kind)))


def solve_bridge(tau12_hat: float, h1: float, h2: float) -> float:
    """Invert the bridge equation orthant(h1, h2; σ) = τ̂₁₂ for σ.

    The orthant probability is strictly increasing in σ, so the root is unique
    whenever it is attainable; otherwise the nearest boundary is returned.
    """
    t_lo = upper_orthant(h1, h2, _SIGMA_LO)
    t_hi = upper_orthant(h1, h2, _SIGMA_HI)
    if tau12_hat >= t_hi:
        if tau12_hat > t_hi:
            logger.debug("tau12=%.6g above attainable range, clamping sigma", tau12_hat)
        return _SIGMA_HI
    if tau12_hat <= t_lo:
        if tau12_hat < t_lo:
            logger.debug("tau12=%.6g below attainable range, clamping sigma", tau12_hat)
        return _SIGMA_LO

    return float(
        optimize.brentq(
            lambda s: upper_orthant(h1, h2, s) - tau12_hat,
            _SIGMA_LO,
            _SIGMA_HI,
            xtol=1e-13,
            rtol=4 * np.finfo(float).eps,
            maxiter=200,
        )
    )


def estimate_pair(col_a: np.ndarray, col_b: np.ndarray, kind: PairKind) -> PairTheta:
    """Estimate σ̂ (and the auxiliary τ̂, ĥ) for one pair by the matching bridge."""
    col_a = np.asarray(col_a, dtype=np.float64)
    col_b = np.asarray(col_b, dtype=np.float64)
    n = col_a.size
    if n != col_b.size:
        raise PairKindMismatchError("columns must have equal length")
    if n < 2:
        raise DegenerateColumnError("pair estimation needs at least 2 samples")

    if kind == PairKind.both_continuous:
        sigma = float(np.mean(col_a * col_b) - col_a.mean() * col_b.mean())
        return PairTheta(kind=kind, sigma_hat=clamp_sigma(sigma))

    # A continuous side's boundary comes from its own split at 0, so τ̂12 never
    # exceeds the attainable range set by the empirical marginals.
    kind_a, kind_b = kind.side_kinds()
    tau1 = float(np.mean(side_indicator(col_a, kind_a)))
    tau2 = float(np.mean(side_indicator(col_b, kind_b)))
    h1, h2 = estimate_h(tau1, n), estimate_h(tau2, n)
    tau12 = estimate_tau_pair(col_a, col_b, kind)
    sigma = solve_bridge(tau12, h1, h2)

    logger.debug(
        "%s: tau=(%.4f, %.4f, %.4f) h=(%.4f, %.4f) sigma=%.6f",
        kind.value,
        tau1,
        tau2,
        tau12,
        h1,
        h2,
        sigma,
    )
    return PairTheta(
        kind=kind,
        sigma_hat=clamp_sigma(sigma),
        h1_hat=h1,
        h2_hat=h2,
        tau1_hat=tau1,
        tau2_hat=tau2,
        tau12_hat=tau12,
    )
