"""Carrier distribution functions on the unit interval.

A carrier is a strictly increasing CDF W on [0, 1] that is composed with
the generalized Pareto kernel to flex the bulk and lower tail of the
positive-rainfall distribution without touching its upper tail (the
survival 1 - W(1-u) stays proportional to u near u = 0).  Three families
are provided:

* ``PowerCarrier``     W(u) = u**kappa                      tag ``m1``
* ``BetaCarrier``      W(u) = 1 - B_d((1-u)**d)             tag ``m2``
* ``PowerBetaCarrier`` W(u) = (1 - B_d((1-u)**d))**(k/2)    tag ``m3``

where B_d is the CDF of a Beta(1/d, 2) variable.  The m2/m3 inverses
have no closed form; they are obtained by bracketed monotone root
finding, with evaluations arranged in log1p/expm1 form so both interval
endpoints keep full precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np
from scipy.optimize import brentq

ROOT_MAXITER = 200
_RTOL = 4 * np.finfo(float).eps


def _check_unit(x, name, lo_open=False, hi_open=False):
    x = np.asarray(x, dtype=float)
    bad = np.isnan(x)
    bad |= (x < 0) | (x > 1)
    if lo_open:
        bad |= x == 0
    if hi_open:
        bad |= x == 1
    if np.any(bad):
        lo, hi = "(" if lo_open else "[", ")" if hi_open else "]"
        raise ValueError(f"{name} must lie in {lo}0, 1{hi}")
    return x


def _match(out, like):
    return float(out) if np.ndim(like) == 0 else out


def beta_cdf(t, delta: float):
    """CDF of a Beta(1/delta, 2) variable.

    B_d(t) = ((1+d)/d) * t**(1/d) * (1 - t/(1+d)), strictly increasing
    from B_d(0) = 0 to B_d(1) = 1.
    """
    if not (np.isfinite(delta) and delta > 0):
        raise ValueError(f"delta must be positive, got {delta!r}")
    t = _check_unit(t, "t")
    out = ((1.0 + delta) / delta) * t ** (1.0 / delta) * (1.0 - t / (1.0 + delta))
    return _match(out, t)


def _w2_cdf(u, delta):
    # 1 - B_d((1-u)**d) rearranged as u - ((1-u)/d)*(1 - (1-u)**d); the
    # expm1/log1p form keeps precision at both endpoints (log1p(-1) is
    # -inf at u = 1, which expm1 maps back to the exact value)
    with np.errstate(divide="ignore"):
        g = -np.expm1(delta * np.log1p(-u))
    return u - (1.0 - u) / delta * g


def _w2_pdf(u, delta):
    # d/du of _w2_cdf
    with np.errstate(divide="ignore"):
        return (1.0 + 1.0 / delta) * -np.expm1(delta * np.log1p(-u))


def _w2_invert(w, delta):
    # solve _w2_cdf(u) = w on [0, 1]; monotone, so a sign-changing
    # bracket always exists
    if w <= 0.0:
        return 0.0
    if w >= 1.0:
        return 1.0
    root, res = brentq(
        lambda u: _w2_cdf(u, delta) - w,
        0.0,
        1.0,
        xtol=1e-24,
        rtol=_RTOL,
        maxiter=ROOT_MAXITER,
        full_output=True,
    )
    if not res.converged:
        raise RuntimeError(
            f"carrier quantile root finding did not converge in {ROOT_MAXITER} iterations"
        )
    return root


@dataclass(frozen=True)
class PowerCarrier:
    """W(u) = u**kappa; kappa tunes the lower tail, kappa = 1 is the identity."""

    kappa: float
    tag: ClassVar[str] = "m1"

    def __post_init__(self) -> None:
        if not (np.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"kappa must be positive, got {self.kappa!r}")

    @property
    def shape_params(self) -> dict[str, float]:
        return {"kappa": self.kappa}

    def cdf(self, u):
        u = _check_unit(u, "u")
        return _match(u**self.kappa, u)

    def pdf(self, u):
        u = _check_unit(u, "u", lo_open=True, hi_open=True)
        return _match(self.kappa * u ** (self.kappa - 1.0), u)

    def quantile(self, v):
        v = _check_unit(v, "v")
        return _match(v ** (1.0 / self.kappa), v)


@dataclass(frozen=True)
class BetaCarrier:
    """W(u) = 1 - B_delta((1-u)**delta); delta reshapes the bulk."""

    delta: float
    tag: ClassVar[str] = "m2"

    def __post_init__(self) -> None:
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be positive, got {self.delta!r}")

    @property
    def shape_params(self) -> dict[str, float]:
        return {"delta": self.delta}

    def cdf(self, u):
        u = _check_unit(u, "u")
        return _match(_w2_cdf(u, self.delta), u)

    def pdf(self, u):
        u = _check_unit(u, "u", lo_open=True, hi_open=True)
        return _match(_w2_pdf(u, self.delta), u)

    def quantile(self, v):
        v = _check_unit(v, "v")
        if np.ndim(v) == 0:
            return _w2_invert(float(v), self.delta)
        return np.array([_w2_invert(float(vi), self.delta) for vi in v])


@dataclass(frozen=True)
class PowerBetaCarrier:
    """W(u) = (1 - B_delta((1-u)**delta))**(kappa/2).

    The extra power restores lower-tail flexibility that the plain Beta
    carrier lacks; kappa = 2 reduces it to ``BetaCarrier``.
    """

    delta: float
    kappa: float
    tag: ClassVar[str] = "m3"

    def __post_init__(self) -> None:
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be positive, got {self.delta!r}")
        if not (np.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"kappa must be positive, got {self.kappa!r}")

    @property
    def shape_params(self) -> dict[str, float]:
        return {"delta": self.delta, "kappa": self.kappa}

    def cdf(self, u):
        u = _check_unit(u, "u")
        return _match(_w2_cdf(u, self.delta) ** (self.kappa / 2.0), u)

    def pdf(self, u):
        u = _check_unit(u, "u", lo_open=True, hi_open=True)
        half_k = self.kappa / 2.0
        w2 = _w2_cdf(u, self.delta)
        out = half_k * w2 ** (half_k - 1.0) * _w2_pdf(u, self.delta)
        return _match(out, u)

    def quantile(self, v):
        v = _check_unit(v, "v")

        def one(vi):
            if vi == 0.0:
                return 0.0
            if vi == 1.0:
                return 1.0
            # W(u) = v  <=>  W2(u) = v**(2/kappa)
            return _w2_invert(np.exp(2.0 / self.kappa * np.log(vi)), self.delta)

        if np.ndim(v) == 0:
            return one(float(v))
        return np.array([one(float(vi)) for vi in v])


Carrier = Union[PowerCarrier, BetaCarrier, PowerBetaCarrier]

CARRIER_TAGS = ("m1", "m2", "m3")

# shape-parameter names per family tag, in canonical order
SHAPE_NAMES = {"m1": ("kappa",), "m2": ("delta",), "m3": ("delta", "kappa")}


def make_carrier(model: str, kappa: float | None = None, delta: float | None = None) -> Carrier:
    """Build a carrier from its family tag and the matching shape parameters.

    Exactly the parameters belonging to the tag must be supplied: kappa
    for m1, delta for m2, both for m3.
    """
    if model == "m1":
        if kappa is None or delta is not None:
            raise ValueError("m1 takes kappa only")
        return PowerCarrier(kappa=kappa)
    if model == "m2":
        if delta is None or kappa is not None:
            raise ValueError("m2 takes delta only")
        return BetaCarrier(delta=delta)
    if model == "m3":
        if delta is None or kappa is None:
            raise ValueError("m3 takes both delta and kappa")
        return PowerBetaCarrier(delta=delta, kappa=kappa)
    raise ValueError(f"unknown carrier model {model!r}; expected one of {CARRIER_TAGS}")
