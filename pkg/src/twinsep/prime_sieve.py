"""Segmented, odd-only sieve of Eratosthenes.

Primes are produced segment by segment as ``int64`` numpy arrays in strictly
ascending order. Memory stays at O(sqrt(N) + segment_size) regardless of the
limit. Segments can be sieved by a process pool; delivery to the consumer is
always in ascending base order, so output does not depend on worker count.
"""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import SieveConfigError

DEFAULT_SEGMENT_SIZE = 1 << 20
MAX_LIMIT = (1 << 63) - 1  # int64 arithmetic throughout


@dataclass(frozen=True)
class SieveConfig:
    limit: int
    segment_size: int = DEFAULT_SEGMENT_SIZE

    def __post_init__(self):
        if int(self.limit) != self.limit or self.limit < 2:
            raise SieveConfigError(f"limit must be an integer >= 2, got {self.limit!r}")
        if self.limit > MAX_LIMIT:
            raise SieveConfigError(f"limit {self.limit} exceeds int64 range")
        if self.segment_size < 64 or self.segment_size % 2:
            raise SieveConfigError(
                f"segment_size must be even and >= 64, got {self.segment_size!r}"
            )


@dataclass
class SieveStats:
    """Work counters; used to check that a run sieves each segment once."""

    segments: int = 0
    candidates: int = 0
    primes: int = 0


def simple_sieve(limit: int) -> np.ndarray:
    """Plain (non-segmented) sieve; all primes <= limit."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def base_primes(limit_root: int) -> np.ndarray:
    """Primes <= limit_root, ascending. These drive the segment sieve."""
    if limit_root < 2:
        raise SieveConfigError(f"limit_root must be >= 2, got {limit_root}")
    return simple_sieve(limit_root)


def sieve_segment(lo: int, size: int, limit: int, odd_primes: np.ndarray) -> np.ndarray:
    """Primes in [lo, min(lo + size, limit + 1)), with ``lo`` even.

    ``odd_primes`` must contain every odd prime <= isqrt(limit). The prime 2 is
    emitted by the segment starting at 0.
    """
    hi = min(lo + size, limit + 1)
    if hi <= lo:
        return np.array([], dtype=np.int64)
    # flags[i] <-> lo + 2*i + 1
    n_odd = (hi - lo) // 2
    try:
        flags = np.ones(n_odd, dtype=bool)
    except MemoryError as exc:
        raise SieveConfigError(f"segment of {size} integers does not fit in memory") from exc
    if lo == 0:
        flags[0] = False  # 1 is not prime

    ps = odd_primes[: np.searchsorted(odd_primes, math.isqrt(hi - 1), side="right")]
    if ps.size:
        first = ((lo + ps - 1) // ps) * ps
        first = np.where(first % 2 == 0, first + ps, first)
        first = np.maximum(first, ps * ps)
        offsets = (first - lo - 1) // 2
        for p, off in zip(ps.tolist(), offsets.tolist()):
            if off < n_odd:
                flags[off::p] = False

    primes = np.flatnonzero(flags).astype(np.int64)
    primes *= 2
    primes += lo + 1
    if lo == 0 and limit >= 2:
        primes = np.concatenate((np.array([2], dtype=np.int64), primes))
    return primes


# Worker-process state, set once per worker by the pool initializer.
_worker_primes: np.ndarray | None = None


def _init_worker(odd_primes: np.ndarray) -> None:
    global _worker_primes
    _worker_primes = odd_primes


def _sieve_in_worker(lo: int, size: int, limit: int) -> np.ndarray:
    return sieve_segment(lo, size, limit, _worker_primes)


@dataclass
class PrimeStream:
    """Ordered stream of every prime <= config.limit.

    Iterating yields Python ints; :meth:`segments` yields one ascending numpy
    array per segment, which is what high-volume consumers should use.
    """

    config: SieveConfig
    workers: int = 1
    stats: SieveStats = field(default_factory=SieveStats)

    def __post_init__(self):
        if self.workers < 1:
            raise SieveConfigError(f"workers must be >= 1, got {self.workers}")

    def _bases(self) -> range:
        return range(0, self.config.limit + 1, self.config.segment_size)

    def _account(self, lo: int, primes: np.ndarray) -> None:
        hi = min(lo + self.config.segment_size, self.config.limit + 1)
        self.stats.segments += 1
        self.stats.candidates += hi - lo
        self.stats.primes += int(primes.size)

    def segments(self) -> Iterator[np.ndarray]:
        limit, size = self.config.limit, self.config.segment_size
        try:
            np.empty(min(size, limit + 1) // 2 + 1, dtype=bool)
        except MemoryError as exc:
            raise SieveConfigError(f"segment of {size} integers does not fit in memory") from exc
        odd = base_primes(max(2, math.isqrt(limit)))[1:]
        if self.workers == 1:
            for lo in self._bases():
                primes = sieve_segment(lo, size, limit, odd)
                self._account(lo, primes)
                yield primes
            return

        # Bounded look-ahead window; results are consumed strictly in base order.
        window = 2 * self.workers
        bases = iter(self._bases())
        with ProcessPoolExecutor(
            max_workers=self.workers, initializer=_init_worker, initargs=(odd,)
        ) as pool:
            pending: deque = deque()
            for lo in bases:
                pending.append((lo, pool.submit(_sieve_in_worker, lo, size, limit)))
                if len(pending) >= window:
                    break
            try:
                while pending:
                    lo, fut = pending.popleft()
                    nxt = next(bases, None)
                    if nxt is not None:
                        pending.append((nxt, pool.submit(_sieve_in_worker, nxt, size, limit)))
                    primes = fut.result()
                    self._account(lo, primes)
                    yield primes
            finally:
                for _, fut in pending:
                    fut.cancel()

    def __iter__(self) -> Iterator[int]:
        for seg in self.segments():
            yield from seg.tolist()


def prime_stream(config: SieveConfig, workers: int = 1) -> PrimeStream:
    return PrimeStream(config, workers=workers)


def count_primes(limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE, workers: int = 1) -> int:
    """pi(limit), counted from the segmented stream."""
    stream = PrimeStream(SieveConfig(limit, segment_size), workers=workers)
    return sum(int(seg.size) for seg in stream.segments())
