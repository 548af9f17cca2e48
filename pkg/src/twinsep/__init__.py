"""Distribution of twin primes within the sequence of primes.

Streams primes from a segmented sieve, counts the primes separating
consecutive twin pairs, fits ln f(s) = -m s + ln m at checkpoints, and
compares the slopes with Prime Number Theorem / Hardy-Littlewood estimates.
"""

from .decay_fit import FitOptions, SlopeFit, Weighting, fit_constrained
from .hl_model import C2, fit_inverse_log, m_tilde
from .pipeline import Convention, RunConfig, execute, run
from .prime_sieve import PrimeStream, SieveConfig, count_primes, prime_stream
from .sep_stats import SeparationHistogram, to_frequency_table
from .twin_scan import CheckpointSpec, TwinScanner, scan

__all__ = [
    "C2", "CheckpointSpec", "Convention", "FitOptions", "PrimeStream", "RunConfig",
    "SeparationHistogram", "SieveConfig", "SlopeFit", "TwinScanner", "Weighting",
    "count_primes", "execute", "fit_constrained", "fit_inverse_log", "m_tilde", "prime_stream",
    "run", "scan", "to_frequency_table",
]
