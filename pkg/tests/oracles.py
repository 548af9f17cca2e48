"""Independent reference implementations used only by the tests."""

import math


def trial_division_primes(limit):
    out = []
    for n in range(2, limit + 1):
        r = math.isqrt(n)
        if all(n % p for p in out if p <= r):
            out.append(n)
    return out


def naive_twin_scan(primes):
    """Quadratic reference: twins from (5, 7) on, separations by explicit counting.

    For every pair of consecutive twins the primes strictly between them are
    counted by a fresh linear search over the whole prime list.
    """
    prime_set = set(primes)
    twins = [(p, p + 2) for p in primes if p >= 5 and p + 2 in prime_set]
    seps = []
    for (_, hi), (lo, _) in zip(twins, twins[1:]):
        seps.append(sum(1 for q in primes if hi < q < lo))
    return twins, seps
