"""Analytic reference quantities for twin-prime counts and separations.

Logarithmic-integral estimates of pi_1 and pi_2 (Prime Number Theorem and the
Hardy-Littlewood twin estimate), the naive evenly-spaced quantities s0 = 1/m0,
their crude N/ln N counterparts, and the fit of the slope law m = C / ln(pi_1).
All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import ModelDomainError

C2 = 0.661618  # twin prime constant, at the precision used throughout
TWO_C2 = 2 * C2


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-6,
    max_depth: int = 60,
) -> float:
    """Integral of f over [a, b], adaptive Simpson with Richardson correction.

    ``tol`` is an absolute error target, split in half at each subdivision.
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_depth)

    def simpson(fa, fm, fb, h):
        return h / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return (recurse(a, m, fa, flm, fm, left, tol / 2, depth - 1)
                + recurse(m, b, fm, frm, fb, right, tol / 2, depth - 1))

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, max_depth)


def _log_integral(power: int, N: float, tol: float) -> float:
    if N < 2:
        raise ModelDomainError(f"N must be >= 2, got {N}")
    if not tol > 0:
        raise ModelDomainError(f"tol must be positive, got {tol}")
    if N == 2:
        return 0.0
    # x = e^u: the integrand e^u / u^k is smooth on [ln 2, ln N] and the
    # absolute error is unchanged by the substitution.
    return adaptive_simpson(lambda u: math.exp(u) / u**power, math.log(2.0), math.log(N), tol)


def li1(N: float, tol: float = 1e-6) -> float:
    """Integral of 1/ln x over [2, N]: the Prime Number Theorem estimate of pi_1."""
    return _log_integral(1, N, tol)


def li2(N: float, tol: float = 1e-6) -> float:
    """2*c2 times the integral of 1/ln^2 x over [2, N]: the twin-pair estimate."""
    return TWO_C2 * _log_integral(2, N, tol / TWO_C2)


def pi1_simple(N: float) -> float:
    """N / ln N."""
    return N / math.log(N)


def pi2_simple(N: float) -> float:
    """2*c2 * N / ln^2 N."""
    return TWO_C2 * N / math.log(N) ** 2


def s0(pi1: int, pi2: int) -> float:
    """Mean number of singletons per twin if twins were evenly spaced."""
    if pi2 < 1:
        raise ModelDomainError(f"pi2 must be >= 1, got {pi2}")
    if pi1 < 2 * pi2:
        raise ModelDomainError(f"pi1={pi1} < 2*pi2={2 * pi2}: negative singleton count")
    return (pi1 - 2 * pi2) / pi2


def m0(pi1: int, pi2: int) -> float:
    """pi2 / (pi1 - 2*pi2), the reciprocal of :func:`s0`."""
    if pi2 < 1:
        raise ModelDomainError(f"pi2 must be >= 1, got {pi2}")
    if pi1 <= 2 * pi2:
        raise ModelDomainError(f"pi1={pi1} <= 2*pi2={2 * pi2}: no singletons")
    return pi2 / (pi1 - 2 * pi2)


def s0_tilde(N: float) -> tuple[float, float]:
    """s0 under the N/ln N approximations: (exact, simplified).

    exact = (ln N - 4 c2) / (2 c2), simplified = ln N / (2 c2).
    """
    if N < 3:
        raise ModelDomainError(f"N must be >= 3, got {N}")
    ln_n = math.log(N)
    return (ln_n - 2 * TWO_C2) / TWO_C2, ln_n / TWO_C2


def log_relation(pi1_tilde: float) -> float:
    """Lowest-order reconstruction of ln N from pi1: ln pi1 + ln ln pi1."""
    if pi1_tilde <= math.e:
        raise ModelDomainError(f"pi1_tilde must exceed e, got {pi1_tilde}")
    lp = math.log(pi1_tilde)
    return lp + math.log(lp)


def s0_tilde_from_pi1(pi1_tilde: float) -> tuple[float, float]:
    """s0 in terms of pi1: (keeping the ln ln term, dropping it).

    The first uses ln N ~ ln pi1 + ln ln pi1; the second is the bare
    ln pi1 / (2 c2) whose reciprocal is :func:`m_tilde`.
    """
    if pi1_tilde <= math.e:
        raise ModelDomainError(f"pi1_tilde must exceed e, got {pi1_tilde}")
    return log_relation(pi1_tilde) / TWO_C2, math.log(pi1_tilde) / TWO_C2


def m_tilde(pi1: float) -> float:
    """2 c2 / ln pi1: predicted decay constant."""
    if pi1 <= 1:
        raise ModelDomainError(f"pi1 must exceed 1, got {pi1}")
    return TWO_C2 / math.log(pi1)


@dataclass(frozen=True)
class ReferenceEstimates:
    N: int
    li1: float
    li2: float
    pi1_simple: float
    pi2_simple: float
    s0: float
    m0: float
    s0_tilde: float
    m_tilde: float


def reference_estimates(N: int, pi1: int, pi2: int, tol: float = 1e-6) -> ReferenceEstimates:
    """All reference quantities for one checkpoint (exact counts pi1, pi2 at N)."""
    return ReferenceEstimates(
        N=N,
        li1=li1(N, tol),
        li2=li2(N, tol),
        pi1_simple=pi1_simple(N),
        pi2_simple=pi2_simple(N),
        s0=s0(pi1, pi2),
        m0=m0(pi1, pi2),
        s0_tilde=s0_tilde(N)[0],
        m_tilde=m_tilde(pi1),
    )


@dataclass(frozen=True)
class ModelFit:
    C: float
    C_err: float
    points_used: int

    def __call__(self, x: float) -> float:
        return self.C / x


def fit_inverse_log(points: Iterable[Sequence[float]]) -> ModelFit:
    """Weighted least squares for m = C / x over (x, m, sigma) points.

    Closed form: C = sum(m/(s^2 x)) / sum(1/(s^2 x^2)), C_err = sum(1/(s^2 x^2))^-1/2.
    """
    pts = [tuple(map(float, p)) for p in points]
    if len(pts) < 2:
        raise ModelDomainError(f"need at least 2 points, got {len(pts)}")
    num = den = 0.0
    for x, m, sigma in pts:
        if not (x > 0 and sigma > 0):
            raise ModelDomainError(f"need x > 0 and sigma > 0, got x={x}, sigma={sigma}")
        wx = 1.0 / (sigma * sigma * x)
        num += wx * m
        den += wx / x
    return ModelFit(num / den, den ** -0.5, len(pts))
