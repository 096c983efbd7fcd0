"""Distance shells of the Johnson graph J(n, k) and their entropy landscape.

Everything is measured relative to a fixed target subset ``x*``.  The shell
at distance ``d`` holds the ``C(k, d) * C(n - k, d)`` subsets that share
exactly ``k - d`` elements with the target.  Entropies are natural logs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, UnsupportedInstanceError

#: Largest ``n`` for which logs are taken of exact big integers rather than
#: assembled from ``lgamma``.  Hitting-time tables use the same cutoff.
EXACT_CUTOFF = 64


@dataclass(frozen=True)
class JohnsonParams:
    """A problem instance: choose ``k`` of ``n`` elements."""

    n: int
    k: int

    def __post_init__(self) -> None:
        for name in ("n", "k"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise DomainError(f"{name} must be an integer, got {value!r}")
        if not 1 <= self.k <= self.n - 1:
            raise DomainError(f"need 1 <= k <= n-1, got n={self.n}, k={self.k}")

    @property
    def d_max(self) -> int:
        return min(self.k, self.n - self.k)

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.k, self.n)

    @property
    def degree(self) -> int:
        """Number of swap neighbours of every vertex."""
        return self.k * (self.n - self.k)

    @property
    def supports_chain(self) -> bool:
        return (self.n, self.k) != (2, 1)

    def require_chain(self) -> None:
        if not self.supports_chain:
            raise UnsupportedInstanceError("J(2, 1) is excluded from distance-chain analysis")

    def check_distance(self, d: int) -> None:
        if isinstance(d, bool) or not isinstance(d, int) or not 0 <= d <= self.d_max:
            raise DomainError(f"distance must be an integer in [0, {self.d_max}], got {d!r}")


def shell_size(params: JohnsonParams, d: int) -> int:
    """Exact number of subsets at swap distance ``d`` from the target."""
    params.check_distance(d)
    return math.comb(params.k, d) * math.comb(params.n - params.k, d)


def shell_sizes(params: JohnsonParams) -> list[int]:
    return [shell_size(params, d) for d in range(params.d_max + 1)]


def _log_comb(a: int, b: int) -> float:
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def log_shell_size_approx(params: JohnsonParams, d: int) -> float:
    """``log |shell d|`` from log-gamma, without building the big integer."""
    params.check_distance(d)
    if d == 0:
        return 0.0
    return _log_comb(params.k, d) + _log_comb(params.n - params.k, d)


def log_shell_sizes(params: JohnsonParams, exact_cutoff: int = EXACT_CUTOFF) -> list[float]:
    if params.n <= exact_cutoff:
        return [math.log(s) for s in shell_sizes(params)]
    return [log_shell_size_approx(params, d) for d in range(params.d_max + 1)]


def entropy_increment(params: JohnsonParams, d: int) -> float:
    """``S(d+1) - S(d)`` via the adjacent-shell ratio, for ``0 <= d < d_max``."""
    if not 0 <= d < params.d_max:
        raise DomainError(f"increment defined for 0 <= d < {params.d_max}, got {d}")
    n, k = params.n, params.k
    return math.log((k - d) * (n - k - d)) - 2.0 * math.log(d + 1)


def continuous_argmax(params: JohnsonParams) -> Fraction:
    """Real-valued location of the largest shell, ``(k(n-k) - 1) / (n + 2)``."""
    return Fraction(params.k * (params.n - params.k) - 1, params.n + 2)


@dataclass(frozen=True)
class ShellProfile:
    params: JohnsonParams
    sizes: tuple[int, ...]
    log_sizes: tuple[float, ...]
    increments: tuple[float, ...]
    argmax_set: frozenset[int]
    continuous_argmax: Fraction
    exact_logs: bool = field(default=True)

    @property
    def continuous_argmax_float(self) -> float:
        return float(self.continuous_argmax)

    def is_unimodal(self) -> bool:
        signs = [(b > a) - (b < a) for a, b in zip(self.sizes, self.sizes[1:])]
        nonzero = [s for s in signs if s]
        return all(a >= b for a, b in zip(nonzero, nonzero[1:]))


def shell_profile(params: JohnsonParams, exact_cutoff: int = EXACT_CUTOFF) -> ShellProfile:
    sizes = shell_sizes(params)
    top = max(sizes)
    return ShellProfile(
        params=params,
        sizes=tuple(sizes),
        log_sizes=tuple(log_shell_sizes(params, exact_cutoff)),
        increments=tuple(entropy_increment(params, d) for d in range(params.d_max)),
        argmax_set=frozenset(d for d, s in enumerate(sizes) if s == top),
        continuous_argmax=continuous_argmax(params),
        exact_logs=params.n <= exact_cutoff,
    )


def shell_distribution(params: JohnsonParams) -> list[Fraction]:
    """Distance law of a uniformly random subset (hypergeometric in ``k - d``)."""
    total = math.comb(params.n, params.k)
    return [Fraction(s, total) for s in shell_sizes(params)]


def distribution_mean(dist: list[Fraction]) -> Fraction:
    return sum((d * p for d, p in enumerate(dist)), Fraction(0))
