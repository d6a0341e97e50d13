"""
File: normal_kernels.py
Description: Univariate and bivariate standard-normal primitives used by the bridge
             equations and their Jacobians: CDF, quantile, bivariate density, the
             upper-orthant probability and its partial derivatives.
"""

import math
from typing import Literal

from scipy import integrate, special

from disct.core.exceptions import DomainError
from disct.schemas.pair_schema import OrthantArgs

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Beyond this distance above max(h1, 0) the integrand is below 1e-32.
_TAIL = 12.0
# Half-width, in conditional standard deviations, of the integrand's rise.
_WINDOW = 8.0
_QUAD_EPSABS = 1e-13
_QUAD_EPSREL = 1e-12


def std_normal_cdf(z: float) -> float:
    """Φ(z)."""
    return float(special.ndtr(z))


def std_normal_sf(z: float) -> float:
    """Φ̄(z) = 1 − Φ(z), computed without cancellation."""
    return float(special.ndtr(-z))


def std_normal_pdf(z: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z)


def std_normal_quantile(p: float) -> float:
    """Φ⁻¹(p) for p in the open unit interval."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"quantile requires 0 < p < 1, got {p}")
    return float(special.ndtri(p))


def bivariate_density(x1: float, x2: float, rho: float) -> float:
    """Standard bivariate normal density with correlation rho."""
    if not -1.0 < rho < 1.0:
        raise DomainError(f"bivariate density requires |rho| < 1, got {rho}")
    one_minus = 1.0 - rho * rho
    quad_form = (x1 * x1 - 2.0 * rho * x1 * x2 + x2 * x2) / (2.0 * one_minus)
    return math.exp(-quad_form) / (2.0 * math.pi * math.sqrt(one_minus))


def _positive_orthant(h1: float, h2: float, rho: float) -> float:
    # Requires 0 < rho < 1. The integrand rises from 0 to φ(t) across a window of
    # width ~√(1−ρ²)/ρ around t = h2/ρ; the window edges are quadrature breakpoints.
    if std_normal_pdf(h1) == 0.0 and h1 > 0.0:
        return 0.0
    upper = max(h1, 0.0) + _TAIL
    scale = math.sqrt(1.0 - rho * rho)

    def integrand(t: float) -> float:
        return _INV_SQRT_2PI * math.exp(-0.5 * t * t) * special.ndtr((rho * t - h2) / scale)

    centre, width = h2 / rho, _WINDOW * scale / rho
    points = [t for t in (centre - width, centre, centre + width) if h1 < t < upper]
    value, _ = integrate.quad(
        integrand,
        h1,
        upper,
        points=points or None,
        epsabs=_QUAD_EPSABS,
        epsrel=_QUAD_EPSREL,
        limit=400,
    )
    return value


def upper_orthant(h1: float, h2: float, rho: float) -> float:
    """P(Z1 > h1, Z2 > h2) without argument validation (hot path of the bridge solver).

    Uses P = ∫_{h1}^∞ φ(t) Φ̄((h2 − ρt)/√(1−ρ²)) dt for ρ > 0. Negative ρ goes
    through Φ̄(h1, h2; ρ) = Φ̄(h1) − Φ̄(h1, −h2; −ρ), whose integrand is monotone.
    """
    if rho == 0.0:
        return std_normal_sf(h1) * std_normal_sf(h2)
    if rho > 0.0:
        value = _positive_orthant(h1, h2, rho)
    else:
        value = std_normal_sf(h1) - _positive_orthant(h1, -h2, -rho)
    return min(max(value, 0.0), 1.0)


def orthant_upper(args: OrthantArgs) -> float:
    """Upper-orthant probability Φ̄(h1, h2; ρ)."""
    return upper_orthant(args.h1, args.h2, args.rho)


def orthant_d_rho(args: OrthantArgs) -> float:
    """∂/∂ρ of the orthant probability, which is the density at the thresholds."""
    return bivariate_density(args.h1, args.h2, args.rho)


def orthant_d_h(args: OrthantArgs, which: Literal[1, 2]) -> float:
    """∂/∂h_which of the orthant probability; never positive."""
    if which not in (1, 2):
        raise DomainError(f"threshold index must be 1 or 2, got {which}")
    h_self, h_other = (args.h1, args.h2) if which == 1 else (args.h2, args.h1)
    scale = math.sqrt(1.0 - args.rho * args.rho)
    return -std_normal_pdf(h_self) * std_normal_sf((h_other - args.rho * h_self) / scale)
