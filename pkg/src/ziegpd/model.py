"""Zero-inflated extended generalized Pareto distribution.

A point mass pi at exactly zero (dry days) is mixed with a continuous
positive part whose CDF is W(H(z)), the carrier W evaluated at the GPD
CDF H.  The module provides the mixed density/CDF/quantile, seeded
sampling, the log likelihood and return levels.

Density convention: ``ziegpd_pdf`` returns the probability MASS pi at
z = 0 and a Lebesgue density for z > 0.  Callers integrating the
density must account for the atom separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .carriers import (
    BetaCarrier,
    Carrier,
    PowerBetaCarrier,
    PowerCarrier,
    SHAPE_NAMES,
    make_carrier,
)
from .gpd import GpdParams, gpd_cdf, gpd_quantile


@dataclass(frozen=True)
class ZiegpdParams:
    """Full parameter set: zero weight pi, carrier family and GPD kernel."""

    pi: float
    carrier: Carrier
    gpd: GpdParams

    def __post_init__(self) -> None:
        if not (np.isfinite(self.pi) and 0.0 <= self.pi <= 1.0):
            raise ValueError(f"pi must lie in [0, 1], got {self.pi!r}")

    @property
    def model(self) -> str:
        return self.carrier.tag

    @classmethod
    def m1(cls, pi: float, kappa: float, sigma: float, xi: float) -> "ZiegpdParams":
        return cls(pi, PowerCarrier(kappa=kappa), GpdParams(sigma=sigma, xi=xi))

    @classmethod
    def m2(cls, pi: float, delta: float, sigma: float, xi: float) -> "ZiegpdParams":
        return cls(pi, BetaCarrier(delta=delta), GpdParams(sigma=sigma, xi=xi))

    @classmethod
    def m3(cls, pi: float, delta: float, kappa: float, sigma: float, xi: float) -> "ZiegpdParams":
        return cls(pi, PowerBetaCarrier(delta=delta, kappa=kappa), GpdParams(sigma=sigma, xi=xi))

    def as_dict(self) -> dict[str, float]:
        """Ordered mapping of parameter name to value (pi, shapes, sigma, xi)."""
        out = {"pi": self.pi}
        out.update(self.carrier.shape_params)
        out["sigma"] = self.gpd.sigma
        out["xi"] = self.gpd.xi
        return {k: float(v) for k, v in out.items()}


def params_to_dict(theta: ZiegpdParams) -> dict:
    """Flat document {model, pi, kappa?/delta?, sigma, xi} for serialization."""
    doc = {"model": theta.model}
    doc.update(theta.as_dict())
    return doc


def params_from_dict(doc: dict) -> ZiegpdParams:
    """Parse the flat parameter document; field presence must match the tag."""
    if "model" not in doc:
        raise ValueError("parameter document is missing the 'model' field")
    model = doc["model"]
    if model not in SHAPE_NAMES:
        raise ValueError(f"unknown model tag {model!r}")
    expected = {"model", "pi", "sigma", "xi", *SHAPE_NAMES[model]}
    got = set(doc)
    if got != expected:
        missing = sorted(expected - got)
        extra = sorted(got - expected)
        parts = []
        if missing:
            parts.append(f"missing {missing}")
        if extra:
            parts.append(f"unexpected {extra}")
        raise ValueError(f"parameter document does not match model {model!r}: " + ", ".join(parts))
    shapes = {name: float(doc[name]) for name in SHAPE_NAMES[model]}
    carrier = make_carrier(model, **shapes)
    return ZiegpdParams(float(doc["pi"]), carrier, GpdParams(float(doc["sigma"]), float(doc["xi"])))


@dataclass(frozen=True, eq=False)
class Sample:
    """Nonnegative observations plus bookkeeping.

    ``seed`` records the generator seed when the sample is synthetic
    and stays 0 for observed data.
    """

    values: np.ndarray
    zero_count: int
    seed: int = 0

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if np.any(values < 0) or np.any(np.isnan(values)):
            raise ValueError("sample values must be nonnegative")
        actual = int(np.count_nonzero(values == 0.0))
        if self.zero_count != actual:
            raise ValueError(f"zero_count {self.zero_count} does not match data ({actual} zeros)")

    @classmethod
    def from_values(cls, values, seed: int = 0) -> "Sample":
        values = np.asarray(values, dtype=float)
        return cls(values=values, zero_count=int(np.count_nonzero(values == 0.0)), seed=seed)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def positives(self) -> np.ndarray:
        return self.values[self.values > 0.0]


def _as_nonneg(z):
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(np.isnan(z)):
        raise ValueError("z must be nonnegative")
    return z


def _match(out, like):
    return float(out) if np.ndim(like) == 0 else out


def _log_pdf_positive(z, carrier: Carrier, gpd: GpdParams):
    """Log density of the positive part, vectorized; assumes z > 0.

    Each family has a closed form in terms of the GPD log survival
    log(hbar); writing everything through expm1/log1p keeps the small-z
    and large-z ends stable.  This is the hot path of every fit, so no
    input validation happens here (public wrappers validate).
    """
    sigma, xi = gpd.sigma, gpd.xi
    if gpd.is_exponential:
        log_hbar = -z / sigma
        one_plus_xi = 1.0
    else:
        log_hbar = np.log1p(xi * z / sigma) / -xi
        one_plus_xi = 1.0 + xi
    log_h = one_plus_xi * log_hbar - np.log(sigma)
    with np.errstate(divide="ignore"):
        if isinstance(carrier, PowerCarrier):
            k = carrier.kappa
            if k == 1.0:
                return log_h
            log_H = np.log(-np.expm1(log_hbar))
            return np.log(k) + (k - 1.0) * log_H + log_h
        if isinstance(carrier, BetaCarrier):
            d = carrier.delta
            return np.log1p(1.0 / d) + np.log(-np.expm1(d * log_hbar)) + log_h
        if isinstance(carrier, PowerBetaCarrier):
            d, k = carrier.delta, carrier.kappa
            hbar = np.exp(log_hbar)
            g = -np.expm1(d * log_hbar)  # 1 - hbar**d
            w2 = -np.expm1(log_hbar) - hbar / d * g
            return (
                np.log(k / 2.0)
                + (k / 2.0 - 1.0) * np.log(w2)
                + np.log1p(1.0 / d)
                + np.log(g)
                + log_h
            )
    raise TypeError(f"unsupported carrier {carrier!r}")


def ziegpd_pdf(z, theta: ZiegpdParams):
    """Mixed density: mass pi at z = 0, (1-pi) * W'(H(z)) * h(z) for z > 0."""
    z = _as_nonneg(z)
    zarr = np.atleast_1d(z)
    out = np.full(zarr.shape, theta.pi)
    pos = zarr > 0
    if np.any(pos):
        if theta.pi == 1.0:
            out[pos] = 0.0
        else:
            out[pos] = (1.0 - theta.pi) * np.exp(
                _log_pdf_positive(zarr[pos], theta.carrier, theta.gpd)
            )
    return _match(out if np.ndim(z) else out[0], z)


def ziegpd_cdf(z, theta: ZiegpdParams):
    """Mixture CDF: pi at z = 0, pi + (1-pi) * W(H(z)) beyond."""
    z = _as_nonneg(z)
    out = theta.pi + (1.0 - theta.pi) * theta.carrier.cdf(gpd_cdf(z, theta.gpd))
    return _match(out, z)


def ziegpd_quantile(p, theta: ZiegpdParams):
    """Quantile of the mixture; any p <= pi maps to the atom at zero.

    For p > pi the conditional-positive probability (p - pi)/(1 - pi)
    is pushed through the carrier inverse and the GPD inverse.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or np.any(p >= 1) or np.any(np.isnan(p)):
        raise ValueError("p must lie in [0, 1)")
    parr = np.atleast_1d(p)
    out = np.zeros(parr.shape)
    above = parr > theta.pi
    if np.any(above):
        if theta.pi == 1.0:
            raise ValueError("quantile above the atom is undefined when pi = 1")
        pstar = (parr[above] - theta.pi) / (1.0 - theta.pi)
        u = theta.carrier.quantile(pstar)
        out[above] = gpd_quantile(u, theta.gpd)
    return _match(out if np.ndim(p) else out[0], p)


def ziegpd_sample(n: int, theta: ZiegpdParams, seed: int) -> Sample:
    """Draw n values: zero with probability pi, otherwise the inverse
    transform gpd_quantile(carrier_quantile(U)).  Deterministic in seed."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    is_zero = rng.random(n) < theta.pi
    u = rng.random(n)
    values = np.zeros(n)
    pos = ~is_zero
    if np.any(pos):
        values[pos] = gpd_quantile(theta.carrier.quantile(u[pos]), theta.gpd)
    return Sample(values=values, zero_count=int(np.count_nonzero(values == 0.0)), seed=int(seed))


def positive_loglik(zpos: np.ndarray, carrier: Carrier, gpd: GpdParams) -> float:
    """Sum of log densities of the positive part (no pi terms); assumes zpos > 0."""
    return float(np.sum(_log_pdf_positive(zpos, carrier, gpd)))


def ziegpd_loglik(data: Sample, theta: ZiegpdParams) -> float:
    """Log likelihood of the mixture.

    Zeros contribute log(pi) each, positive values log(1-pi) plus the
    log positive-part density.  Returns -inf when pi = 0 with zeros
    present or pi = 1 with positives present.
    """
    if data.n == 0:
        raise ValueError("data must be nonempty")
    n0 = data.zero_count
    zpos = data.positives
    npos = zpos.size
    if n0 > 0 and theta.pi == 0.0:
        return float("-inf")
    if npos > 0 and theta.pi == 1.0:
        return float("-inf")
    total = 0.0
    if n0 > 0:
        total += n0 * np.log(theta.pi)
    if npos > 0:
        total += npos * np.log1p(-theta.pi)
        total += positive_loglik(zpos, theta.carrier, theta.gpd)
    return float(total)


def return_level(T: float, theta: ZiegpdParams) -> float:
    """Level exceeded once per T periods, the (1 - 1/T) quantile.

    Requires 1 - 1/T > pi, otherwise the requested level sits inside
    the zero atom and is reported as an error rather than 0.
    """
    if not T > 1:
        raise ValueError("return period T must exceed 1")
    p = 1.0 - 1.0 / T
    if p <= theta.pi:
        raise ValueError(
            f"return period {T} corresponds to probability {p:.6g} <= pi = {theta.pi:.6g}; "
            "the level is inside the zero atom"
        )
    return float(ziegpd_quantile(p, theta))
