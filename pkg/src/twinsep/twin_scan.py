"""Single ordered pass over the primes: twins, separations, running counts.

Conventions:

* 2 and the pair (3, 5) count toward ``pi1_raw`` but are never analyzed; the
  first analyzed twin, index 1, is (5, 7).
* The separation after twin k is the number of primes strictly between the
  high element of twin k and the low element of twin k + 1.
* Primes after the last complete twin below a limit checkpoint are dropped
  from the histogram (reported as ``discarded_singletons``).

Work is done a block (numpy array of primes) at a time. Global prime index g
is 0-based, so 2 -> 0, 3 -> 1, 5 -> 2, and for consecutive analyzed twins with
low indices g_k < g_{k+1} the separation is ``g_{k+1} - g_k - 2``.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np

from .errors import ScanOrderError
from .prime_sieve import PrimeStream
from .sep_stats import SeparationHistogram

# Primes 2 and 3 are excluded from analysis.
EXCLUDED_PRIMES = 2


@dataclass(frozen=True)
class TwinPair:
    low: int
    high: int
    index: int


@dataclass(frozen=True)
class SeparationEvent:
    after_twin_index: int
    separation: int


ScanEvent = Union[TwinPair, SeparationEvent]


@dataclass
class ScanState:
    pi1_raw: int = 0
    pi2_analyzed: int = 0
    pending_singletons: int = 0
    last_prime: int | None = None


@dataclass(frozen=True, order=True)
class CheckpointSpec:
    """Where to freeze statistics.

    ``kind="twins"``: after the analyzed twin with this 1-based index (twin 1
    is (5, 7)). ``kind="limit"``: over all primes <= value.
    """

    kind: Literal["twins", "limit"]
    value: int

    def __post_init__(self):
        if self.kind not in ("twins", "limit"):
            raise ValueError(f"unknown checkpoint kind {self.kind!r}")
        if self.value < 1:
            raise ValueError(f"checkpoint value must be positive, got {self.value}")

    @classmethod
    def at_twin_count(cls, k: int) -> "CheckpointSpec":
        return cls("twins", k)

    @classmethod
    def at_limit(cls, n: int) -> "CheckpointSpec":
        return cls("limit", n)


@dataclass(frozen=True)
class CheckpointSnapshot:
    spec: CheckpointSpec
    n_effective: int
    pi1_raw: int
    pi2_analyzed: int
    histogram: SeparationHistogram = field(compare=False)
    discarded_singletons: int = 0

    @property
    def pi1_adjusted(self) -> int:
        """pi(N) without 2 and 3."""
        return self.pi1_raw - EXCLUDED_PRIMES

    @property
    def pi2_standard(self) -> int:
        """Twin count including the skipped pair (3, 5)."""
        return self.pi2_analyzed + 1


@dataclass(frozen=True)
class ScanBlock:
    """What one block contributed: new twins and the separation before each.

    ``separations[i]`` is the separation preceding twin ``indices[i]``; it is
    -1 for twin 1, which has no predecessor.
    """

    lows: np.ndarray
    indices: np.ndarray
    separations: np.ndarray

    def events(self) -> Iterator[ScanEvent]:
        for low, idx, sep in zip(self.lows.tolist(), self.indices.tolist(), self.separations.tolist()):
            if sep >= 0:
                yield SeparationEvent(idx - 1, sep)
            yield TwinPair(low, low + 2, idx)


class TwinScanner:
    """Stateful consumer of the ordered prime stream.

    Feed ascending blocks with :meth:`feed`; snapshots for the requested
    checkpoints accumulate in :attr:`snapshots` as they are reached. Call
    :meth:`finish` with the stream's upper bound once input is exhausted.
    """

    def __init__(self, checkpoints: Iterable[CheckpointSpec] = ()):
        checkpoints = list(checkpoints)
        self._twin_cps = sorted(c.value for c in checkpoints if c.kind == "twins")
        self._limit_cps = sorted(c.value for c in checkpoints if c.kind == "limit")
        for vals in (self._twin_cps, self._limit_cps):
            if len(set(vals)) != len(vals):
                raise ValueError("checkpoint values must be strictly increasing")
        self.state = ScanState()
        self.histogram = SeparationHistogram()
        self.snapshots: list[CheckpointSnapshot] = []
        self.incomplete: list[CheckpointSpec] = []
        self._last_twin_g: int | None = None
        self._finished = False

    @property
    def pending(self) -> list[CheckpointSpec]:
        """Checkpoints not yet reached."""
        return ([CheckpointSpec("twins", k) for k in self._twin_cps]
                + [CheckpointSpec("limit", n) for n in self._limit_cps])

    def feed(self, primes: np.ndarray) -> ScanBlock:
        st = self.state
        primes = np.asarray(primes, dtype=np.int64)
        if self._finished:
            raise ScanOrderError("scanner already finished")
        if primes.size == 0:
            return ScanBlock(*(np.zeros(0, dtype=np.int64) for _ in range(3)))
        if primes.size > 1 and not bool(np.all(np.diff(primes) > 0)):
            raise ScanOrderError("prime block is not strictly increasing")
        if st.last_prime is not None and primes[0] <= st.last_prime:
            raise ScanOrderError(
                f"prime {int(primes[0])} does not follow {st.last_prime}"
            )

        g0 = st.pi1_raw
        if st.last_prime is None:
            ext, ext_g0 = primes, g0
        else:
            ext, ext_g0 = np.concatenate(([st.last_prime], primes)), g0 - 1
        pos = np.flatnonzero(np.diff(ext) == 2)
        low_g = ext_g0 + pos
        analyzed = low_g >= 2  # drops (3, 5)
        pos, low_g = pos[analyzed], low_g[analyzed]
        lows = ext[pos]
        highs = lows + 2

        prev_g = -1 if self._last_twin_g is None else self._last_twin_g
        chain = np.concatenate(([prev_g], low_g))
        seps = np.diff(chain) - 2
        if self._last_twin_g is None and seps.size:
            seps[0] = -1
        indices = np.arange(st.pi2_analyzed + 1, st.pi2_analyzed + 1 + lows.size, dtype=np.int64)
        valid = seps >= 0

        def partial(t: int) -> SeparationHistogram:
            h = self.histogram.copy()
            return h.add_many(seps[:t][valid[:t]])

        last_index = st.pi2_analyzed + int(lows.size)
        while self._twin_cps and self._twin_cps[0] <= last_index:
            k = self._twin_cps.pop(0)
            t = k - st.pi2_analyzed
            self.snapshots.append(CheckpointSnapshot(
                CheckpointSpec("twins", k), int(highs[t - 1]), int(low_g[t - 1]) + 2, k, partial(t),
            ))

        while self._limit_cps and self._limit_cps[0] < primes[-1]:
            self._snapshot_limit(self._limit_cps.pop(0), primes, g0, highs, low_g, partial)

        self.histogram.add_many(seps[valid])
        st.pi1_raw += int(primes.size)
        st.last_prime = int(primes[-1])
        st.pi2_analyzed += int(lows.size)
        if lows.size:
            self._last_twin_g = int(low_g[-1])
        st.pending_singletons = self._pending(st.pi1_raw, self._last_twin_g)
        return ScanBlock(lows, indices, seps)

    @staticmethod
    def _pending(pi1: int, last_twin_g: int | None) -> int:
        if last_twin_g is None:
            return max(0, pi1 - EXCLUDED_PRIMES)
        return pi1 - (last_twin_g + 2)

    def _snapshot_limit(self, n, primes, g0, highs, low_g, partial) -> None:
        pi1 = g0 + int(np.searchsorted(primes, n, side="right"))
        t = int(np.searchsorted(highs, n, side="right"))
        last_g = int(low_g[t - 1]) if t else self._last_twin_g
        self.snapshots.append(CheckpointSnapshot(
            CheckpointSpec("limit", n), n, pi1, self.state.pi2_analyzed + t,
            partial(t), self._pending(pi1, last_g),
        ))

    def push(self, p: int) -> list[ScanEvent]:
        """Scalar feed; returns the events this prime completed."""
        return list(self.feed(np.array([p], dtype=np.int64)).events())

    def finish(self, limit: int) -> list[CheckpointSpec]:
        """Close the stream at ``limit``; returns checkpoints that were never reached."""
        empty = np.zeros(0, dtype=np.int64)
        while self._limit_cps and self._limit_cps[0] <= limit:
            n = self._limit_cps.pop(0)
            self._snapshot_limit(n, empty, self.state.pi1_raw, empty, empty, lambda t: self.histogram.copy())
        self.incomplete = [CheckpointSpec("twins", k) for k in self._twin_cps]
        self.incomplete += [CheckpointSpec("limit", n) for n in self._limit_cps]
        self._twin_cps, self._limit_cps = [], []
        self._finished = True
        return self.incomplete


def _blocks(primes: Union[PrimeStream, np.ndarray, Iterable[int]], chunk: int = 4096):
    if isinstance(primes, PrimeStream):
        yield from primes.segments()
    elif isinstance(primes, np.ndarray):
        yield primes
    else:
        buf: list[int] = []
        for p in primes:
            buf.append(p)
            if len(buf) == chunk:
                yield np.array(buf, dtype=np.int64)
                buf = []
        if buf:
            yield np.array(buf, dtype=np.int64)


def scan(
    primes: Union[PrimeStream, np.ndarray, Iterable[int]],
    scanner: TwinScanner | None = None,
) -> Iterator[ScanEvent]:
    """Yield twins and separations in scan order.

    For each analyzed twin k > 1 the separation event that precedes it,
    ``SeparationEvent(k - 1, s)``, is emitted just before ``TwinPair(k)``.
    Pass a ``scanner`` to inspect running state afterwards.
    """
    scanner = scanner if scanner is not None else TwinScanner()
    for block in _blocks(primes):
        yield from scanner.feed(block).events()


def checkpoint(scanner: TwinScanner, spec: CheckpointSpec) -> CheckpointSnapshot:
    """Look up the snapshot taken for ``spec``."""
    for snap in scanner.snapshots:
        if snap.spec == spec:
            return snap
    raise KeyError(f"checkpoint {spec} was not reached")
