"""Generalized Pareto kernel restricted to nonnegative shape.

CDF, density and quantile of the GPD on z >= 0.  The shape (tail index)
is restricted to xi >= 0; values of |xi| below ``XI_ZERO_TOL`` are routed
to the exponential-limit branch, which avoids catastrophic cancellation
in (1 + xi*z/sigma)**(-1/xi).  With z >= 0, sigma > 0 and xi >= 0 the
base 1 + xi*z/sigma is always >= 1, so the positive-part truncation of
the textbook formula is unreachable here and is not clamped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# shapes below this are treated as exactly zero (exponential branch)
XI_ZERO_TOL = 1e-8


@dataclass(frozen=True)
class GpdParams:
    """Scale sigma > 0 (data units) and dimensionless tail index xi >= 0."""

    sigma: float
    xi: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be a positive real, got {self.sigma!r}")
        if not (np.isfinite(self.xi) and self.xi >= 0):
            raise ValueError(f"xi must be a nonnegative real, got {self.xi!r}")

    @property
    def is_exponential(self) -> bool:
        return self.xi < XI_ZERO_TOL


def _as_nonneg(z):
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(np.isnan(z)):
        raise ValueError("z must be nonnegative")
    return z


def _match(out, like):
    return float(out) if np.ndim(like) == 0 else out


def gpd_log_sf(z, p: GpdParams):
    """log of the survival function, log(1 - CDF)(z); vectorized in z."""
    z = _as_nonneg(z)
    if p.is_exponential:
        out = -z / p.sigma
    else:
        out = np.log1p(p.xi * z / p.sigma) / -p.xi
    return _match(out, z)


def gpd_sf(z, p: GpdParams):
    """Survival function (1 + xi*z/sigma)**(-1/xi), or exp(-z/sigma) at xi=0."""
    return _match(np.exp(gpd_log_sf(z, p)), z)


def gpd_cdf(z, p: GpdParams):
    """GPD CDF at z >= 0.

    Returns 1 - (1 + xi*z/sigma)**(-1/xi) for xi above the zero
    tolerance and 1 - exp(-z/sigma) otherwise.
    """
    z = _as_nonneg(z)
    return _match(-np.expm1(gpd_log_sf(z, p)), z)


def gpd_logpdf(z, p: GpdParams):
    """log density; the density at the origin is 1/sigma for every xi."""
    z = _as_nonneg(z)
    if p.is_exponential:
        out = -np.log(p.sigma) - z / p.sigma
    else:
        out = -np.log(p.sigma) + (1.0 + p.xi) * gpd_log_sf(z, p)
    return _match(out, z)


def gpd_pdf(z, p: GpdParams):
    """GPD density (1/sigma)*(1 + xi*z/sigma)**(-1/xi - 1) on z >= 0."""
    z = _as_nonneg(z)
    return _match(np.exp(gpd_logpdf(z, p)), z)


def gpd_quantile(u, p: GpdParams):
    """Inverse CDF on u in [0, 1).

    (sigma/xi)*((1-u)**(-xi) - 1) in the heavy-tailed branch,
    -sigma*log(1-u) in the exponential limit.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u < 0) or np.any(u >= 1) or np.any(np.isnan(u)):
        raise ValueError("u must lie in [0, 1)")
    if p.is_exponential:
        out = -p.sigma * np.log1p(-u)
    else:
        out = (p.sigma / p.xi) * np.expm1(-p.xi * np.log1p(-u))
    return _match(out, u)
