"""Goodness-of-fit data for QQ and CDF-overlay plots.

No rendering here: both functions emit plot-ready columns that external
tools draw.  QQ pairs cover the positive observations only (the zero
atom is diagnosed through the CDF overlay, where it shows up as the
step at the origin).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Sample, ZiegpdParams, ziegpd_cdf, ziegpd_quantile

PLOTTING_POSITIONS = ("weibull", "hazen")


@dataclass(frozen=True, eq=False)
class QqData:
    """Sorted empirical/model quantile pairs for the positive part."""

    empirical: np.ndarray
    model: np.ndarray
    positions: str


@dataclass(frozen=True, eq=False)
class CdfCompareData:
    """Empirical and model CDF sampled on a shared grid from 0 to max(data)."""

    grid: np.ndarray
    empirical: np.ndarray
    model: np.ndarray


def qq_data(data: Sample, theta: ZiegpdParams, positions: str = "weibull") -> QqData:
    """Model quantiles against the ordered positive observations.

    Order statistic i of the m positives is matched to the mixture
    quantile at pi + (1-pi) * position(i), i.e. the conditional-positive
    quantile at the chosen plotting position.
    """
    if positions not in PLOTTING_POSITIONS:
        raise ValueError(f"positions must be one of {PLOTTING_POSITIONS}")
    zpos = np.sort(data.positives)
    m = zpos.size
    if m < 2:
        raise ValueError("need at least 2 positive observations for a QQ plot")
    i = np.arange(1, m + 1)
    pp = i / (m + 1.0) if positions == "weibull" else (i - 0.5) / m
    model_q = ziegpd_quantile(theta.pi + (1.0 - theta.pi) * pp, theta)
    return QqData(empirical=zpos, model=np.asarray(model_q), positions=positions)


def cdf_compare_data(data: Sample, theta: ZiegpdParams, grid_size: int = 200) -> CdfCompareData:
    """Empirical step CDF over all observations next to the model CDF."""
    if grid_size < 10:
        raise ValueError("grid_size must be at least 10")
    top = float(data.values.max()) if data.n else 0.0
    grid = np.linspace(0.0, top, grid_size)
    sorted_values = np.sort(data.values)
    empirical = np.searchsorted(sorted_values, grid, side="right") / data.n
    model = np.asarray(ziegpd_cdf(grid, theta))
    return CdfCompareData(grid=grid, empirical=empirical, model=model)


def write_qq_csv(qq: QqData, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("empirical_quantile,model_quantile\n")
        for e, m in zip(qq.empirical, qq.model):
            fh.write(f"{e:.6g},{m:.6g}\n")


def write_cdf_csv(cdf: CdfCompareData, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("z,empirical_cdf,model_cdf\n")
        for z, e, m in zip(cdf.grid, cdf.empirical, cdf.model):
            fh.write(f"{z:.6g},{e:.6g},{m:.6g}\n")
