"""Validation statistics for simulated-vs-reference illuminance series.

Conventions: the normalized root-mean-square deviation and the mean bias
deviation are normalized by the mean of the reference series; relative
errors are fractions of the reference value at each point; the reliability
percentage (``rsd``) is either the share of simulated values inside the
reference margins (margin mode) or 100 minus the mean absolute relative
error in percent (error mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .errors import MetricError


@dataclass(eq=False)
class SeriesPair:
    """Aligned simulated and reference series, optionally with per-point
    acceptance margins (lower/upper, same units as the values)."""

    sim: np.ndarray
    ref: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        self.sim = np.asarray(self.sim, dtype=float)
        self.ref = np.asarray(self.ref, dtype=float)
        if self.sim.ndim != 1 or self.ref.ndim != 1:
            raise ValueError("series must be one-dimensional")
        if len(self.sim) != len(self.ref) or len(self.sim) < 1:
            raise ValueError("series must have equal, non-zero length")
        if (self.lower is None) != (self.upper is None):
            raise ValueError("margins need both lower and upper bounds")
        if self.lower is not None:
            self.lower = np.asarray(self.lower, dtype=float)
            self.upper = np.asarray(self.upper, dtype=float)
            if self.lower.shape != self.sim.shape or self.upper.shape != self.sim.shape:
                raise ValueError("margins must match the series length")
            if np.any(self.lower > self.upper):
                raise ValueError("lower margin exceeds upper margin")

    @property
    def n(self) -> int:
        return len(self.sim)

    @property
    def ref_mean(self) -> float:
        return float(self.ref.mean())


def rmsd(pair: SeriesPair) -> float:
    """Root-mean-square deviation normalized by the reference mean."""
    mean = pair.ref_mean
    if mean == 0.0:
        raise MetricError("reference mean is zero: normalized RMSD undefined")
    return float(math.sqrt(np.mean((pair.sim - pair.ref) ** 2)) / mean)


def mbd(pair: SeriesPair) -> float:
    """Mean bias deviation in percent (positive = overestimation)."""
    mean = pair.ref_mean
    if mean == 0.0:
        raise MetricError("reference mean is zero: MBD undefined")
    return float(np.sum(pair.sim - pair.ref) / (pair.n * mean) * 100.0)


def r2(pair: SeriesPair) -> tuple[float, float]:
    """Squared-deviation ratio and the conventional coefficient of
    determination (their sum is exactly 1)."""
    denom = float(np.sum((pair.ref - pair.ref_mean) ** 2))
    if denom == 0.0:
        raise MetricError("reference series is constant: R^2 undefined")
    ratio = float(np.sum((pair.sim - pair.ref) ** 2) / denom)
    return ratio, 1.0 - ratio


@dataclass(frozen=True, eq=False)
class RelativeErrors:
    """Per-point relative errors (fractions); points with a zero reference
    are excluded and counted."""

    values: np.ndarray
    mean: float
    mean_abs: float
    n_excluded: int


def relative_errors(pair: SeriesPair) -> RelativeErrors:
    """Relative error (sim - ref) / |ref| at each point with a non-zero
    reference, plus the signed and absolute means."""
    nonzero = pair.ref != 0.0
    if not nonzero.any():
        raise MetricError("all reference values are zero: relative errors undefined")
    eps = (pair.sim[nonzero] - pair.ref[nonzero]) / np.abs(pair.ref[nonzero])
    return RelativeErrors(
        values=eps,
        mean=float(eps.mean()),
        mean_abs=float(np.abs(eps).mean()),
        n_excluded=int(pair.n - nonzero.sum()),
    )


def rsd(pair: SeriesPair, mode: str = "error") -> float:
    """Reliability percentage.

    margin mode: 100 * (count of simulated values inside [lower, upper]) / N.
    error mode: 100 - mean absolute relative error in percent, clamped to
    [0, 100].
    """
    if mode == "margin":
        if pair.lower is None or pair.upper is None:
            raise ValueError("margin mode requires margins on the series pair")
        inside = (pair.sim >= pair.lower) & (pair.sim <= pair.upper)
        return float(inside.sum() / pair.n * 100.0)
    if mode == "error":
        err = relative_errors(pair)
        return float(min(100.0, max(0.0, 100.0 - err.mean_abs * 100.0)))
    raise ValueError(f"unknown reliability mode {mode!r}")


def build_margins(ref, error_fraction: float) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric margins ref*(1 -+ e) around the reference values."""
    if not 0.0 <= error_fraction <= 1.0:
        raise ValueError(f"error fraction {error_fraction} out of [0, 1]")
    ref = np.asarray(ref, dtype=float)
    return ref * (1.0 - error_fraction), ref * (1.0 + error_fraction)


def resample_hourly(timestamps, values) -> tuple[list[datetime], np.ndarray]:
    """Arithmetic mean per clock hour; hours without samples are omitted.

    Returns (hour starts, means) in chronological order.
    """
    values = np.asarray(values, dtype=float)
    groups: dict[datetime, list[float]] = {}
    for ts, v in zip(timestamps, values):
        key = ts.replace(minute=0, second=0, microsecond=0)
        groups.setdefault(key, []).append(float(v))
    hours = sorted(groups)
    means = np.array([float(np.mean(groups[h])) for h in hours])
    return hours, means


@dataclass(eq=False)
class ValidationReport:
    """All indicators for one simulated-vs-reference comparison."""

    n: int
    rmsd: float
    mbd_pct: float
    r2_printed: float
    r2_standard: float
    eps_mean_pct: float
    eps_mean_abs_pct: float
    n_excluded: int
    rsd_pct: float
    rsd_mode: str

    def to_table(self, name: str = "series") -> str:
        """Tab-delimited report, ending with a one-row summary table of
        test name, relative error and reliability."""
        ok = self.rsd_pct >= 50.0
        observation = (
            "RSD >= 50%: acceptable" if ok else "RSD < 50%: below acceptability threshold"
        )
        lines = [
            "metric\tvalue",
            f"N\t{self.n}",
            f"excluded_zero_reference\t{self.n_excluded}",
            f"RMSD\t{self.rmsd:.6g}",
            f"MBD_pct\t{self.mbd_pct:.6g}",
            f"R2_printed\t{self.r2_printed:.6g}",
            f"R2_standard\t{self.r2_standard:.6g}",
            f"mean_relative_error_pct\t{self.eps_mean_pct:.6g}",
            f"mean_abs_relative_error_pct\t{self.eps_mean_abs_pct:.6g}",
            f"RSD_pct\t{self.rsd_pct:.6g}",
            f"RSD_mode\t{self.rsd_mode}",
            "",
            "test\trelative_error_pct\tRSD_pct\tobservation",
            f"{name}\t{self.eps_mean_abs_pct:.2f}\t{self.rsd_pct:.2f}\t{observation}",
        ]
        return "\n".join(lines) + "\n"


def evaluate_pair(pair: SeriesPair, mode: str = "error") -> ValidationReport:
    """Compute every indicator for a series pair.

    A constant reference leaves R^2 undefined; the report records it as NaN
    rather than failing, since the other indicators are still meaningful.
    """
    err = relative_errors(pair)
    try:
        printed, standard = r2(pair)
    except MetricError:
        printed = standard = float("nan")
    return ValidationReport(
        n=pair.n,
        rmsd=rmsd(pair),
        mbd_pct=mbd(pair),
        r2_printed=printed,
        r2_standard=standard,
        eps_mean_pct=err.mean * 100.0,
        eps_mean_abs_pct=err.mean_abs * 100.0,
        n_excluded=err.n_excluded,
        rsd_pct=rsd(pair, mode),
        rsd_mode=mode,
    )
