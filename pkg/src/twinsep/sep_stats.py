"""Separation histograms and the normalized log-frequency table fed to the fit."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .errors import InsufficientDataError


def fmt_real(x: float) -> str:
    """17 significant digits: lossless float round-trip through text."""
    return format(float(x), ".17g")


class SeparationHistogram:
    """Counts of prime separations between consecutive twins.

    Stored densely (index = separation) so whole segments of separations can be
    added with one ``bincount``; :attr:`counts` exposes only observed bins.
    """

    __slots__ = ("_dense",)

    def __init__(self, counts: dict[int, int] | None = None):
        self._dense = np.zeros(0, dtype=np.int64)
        if counts:
            for s, c in counts.items():
                if s < 0 or c < 0:
                    raise ValueError(f"invalid histogram entry {s}: {c}")
                self._grow(s + 1)
                self._dense[s] += c

    def _grow(self, size: int) -> None:
        if size > self._dense.size:
            self._dense = np.concatenate(
                (self._dense, np.zeros(size - self._dense.size, dtype=np.int64))
            )

    @property
    def counts(self) -> dict[int, int]:
        nz = np.flatnonzero(self._dense)
        return dict(zip(nz.tolist(), self._dense[nz].tolist()))

    @property
    def total_events(self) -> int:
        return int(self._dense.sum())

    def accumulate(self, separation: int) -> "SeparationHistogram":
        if separation < 0:
            raise ValueError(f"separation must be >= 0, got {separation}")
        self._grow(separation + 1)
        self._dense[separation] += 1
        return self

    def add_many(self, separations: np.ndarray) -> "SeparationHistogram":
        """Vectorized accumulate of a whole array of separations."""
        if separations.size == 0:
            return self
        if separations.min() < 0:
            raise ValueError("negative separation")
        binned = np.bincount(separations)
        self._grow(binned.size)
        self._dense[: binned.size] += binned
        return self

    def copy(self) -> "SeparationHistogram":
        out = SeparationHistogram()
        out._dense = self._dense.copy()
        return out

    def __add__(self, other: "SeparationHistogram") -> "SeparationHistogram":
        out = self.copy()
        out._grow(other._dense.size)
        out._dense[: other._dense.size] += other._dense
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SeparationHistogram):
            return NotImplemented
        return self.counts == other.counts

    def __repr__(self) -> str:
        return f"SeparationHistogram({self.counts})"


def accumulate(hist: SeparationHistogram, separation: int) -> SeparationHistogram:
    return hist.accumulate(separation)


def merge(histograms: Iterable[SeparationHistogram]) -> SeparationHistogram:
    out = SeparationHistogram()
    for h in histograms:
        out = out + h
    return out


@dataclass(frozen=True)
class FrequencyTable:
    separation: np.ndarray  # int64, ascending
    count: np.ndarray  # int64, all >= 1
    rel_freq: np.ndarray
    log_rel_freq: np.ndarray
    total_events: int

    def __len__(self) -> int:
        return int(self.separation.size)

    def rows(self):
        for s, c, f, lf in zip(
            self.separation.tolist(), self.count.tolist(),
            self.rel_freq.tolist(), self.log_rel_freq.tolist(),
        ):
            yield s, c, f, lf


def to_frequency_table(hist: SeparationHistogram) -> FrequencyTable:
    total = hist.total_events
    if total < 2:
        raise InsufficientDataError(
            f"need at least 2 separation events to normalize, got {total}"
        )
    counts = hist.counts
    s = np.fromiter(counts.keys(), dtype=np.int64, count=len(counts))
    c = np.fromiter(counts.values(), dtype=np.int64, count=len(counts))
    f = c / total
    return FrequencyTable(s, c, f, np.log(f), total)


HIST_HEADER = ["separation", "count", "rel_freq", "ln_rel_freq"]


def write_frequency_table(
    table: FrequencyTable, fh: TextIO, fitted_slope: float | None = None
) -> None:
    """Write the table as CSV; with a slope, add the fitted line -m*s + ln m."""
    w = csv.writer(fh, lineterminator="\n")
    header = list(HIST_HEADER)
    if fitted_slope is not None:
        header.append("fit_ln_freq")
    w.writerow(header)
    for s, c, f, lf in table.rows():
        row = [s, c, fmt_real(f), fmt_real(lf)]
        if fitted_slope is not None:
            row.append(fmt_real(-fitted_slope * s + math.log(fitted_slope)))
        w.writerow(row)
