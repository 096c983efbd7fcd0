"""The lumped birth-death chain followed by the distance to the target.

With a flat objective (``beta == 0``) every quantity is an exact
``Fraction``.  With Metropolis guidance towards the target (``beta > 0``)
outward moves are accepted with probability ``exp(-beta)``; only the
up-probabilities change and everything is carried in floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import DomainError
from .shells import JohnsonParams, shell_size

Number = Union[Fraction, float]

# Below this, expm1(beta) is treated as zero and the flat closed form is used.
_BETA_FLAT = 1e-12


def _check_beta(beta: float) -> float:
    try:
        value = float(beta)
    except (TypeError, ValueError):
        raise DomainError(f"beta must be a real number, got {beta!r}") from None
    if not math.isfinite(value) or value < 0:
        raise DomainError(f"beta must be finite and >= 0, got {beta!r}")
    return value


def down_probability(params: JohnsonParams, d: int) -> Fraction:
    """Probability that a uniform swap moves one step closer to the target."""
    return Fraction(d * d, params.degree)


def up_probability(params: JohnsonParams, d: int) -> Fraction:
    """Probability that a uniform swap moves one step away (before acceptance)."""
    n, k = params.n, params.k
    return Fraction((k - d) * (n - k - d), params.degree)


@dataclass(frozen=True)
class DistanceChain:
    params: JohnsonParams
    beta: float
    p: tuple[Number, ...]
    q: tuple[Number, ...]
    r: tuple[Number, ...]

    @property
    def exact(self) -> bool:
        return self.beta == 0

    def as_floats(self) -> tuple[list[float], list[float], list[float]]:
        return [float(x) for x in self.p], [float(x) for x in self.q], [float(x) for x in self.r]

    def transition_matrix(self):
        """Dense (d_max + 1)-square transition matrix as a numpy array."""
        import numpy as np

        size = self.params.d_max + 1
        mat = np.zeros((size, size))
        p, q, r = self.as_floats()
        for d in range(size):
            mat[d, d] = r[d]
            if d > 0:
                mat[d, d - 1] = q[d]
            if d < size - 1:
                mat[d, d + 1] = p[d]
        return mat


def build_chain(params: JohnsonParams, beta: float = 0.0) -> DistanceChain:
    params.require_chain()
    beta = _check_beta(beta)
    ds = range(params.d_max + 1)
    q0 = [down_probability(params, d) for d in ds]
    p0 = [up_probability(params, d) for d in ds]
    if beta == 0:
        p, q = p0, q0
        r = [1 - a - b for a, b in zip(p, q)]
    else:
        accept = math.exp(-beta)
        p = [float(x) * accept for x in p0]
        q = [float(x) for x in q0]
        r = [max(0.0, 1.0 - a - b) for a, b in zip(p, q)]
    return DistanceChain(params, beta, tuple(p), tuple(q), tuple(r))


@dataclass(frozen=True)
class DriftProfile:
    drift: tuple[Number, ...]
    variance: tuple[Number, ...]
    equilibrium: Number
    # False when the drift root falls outside (0, d_max); the sign-change
    # property is then not asserted.
    equilibrium_in_range: bool


def equilibrium_distance(params: JohnsonParams, beta: float = 0.0) -> Number:
    """Distance at which the (Metropolis) drift vanishes.

    For ``beta > 0`` this is the positive root of
    ``(k-d)(n-k-d) exp(-beta) = d**2``, written in the rationalised form
    ``2 k (n-k) / (n + sqrt(n**2 + 4 (e**beta - 1) k (n-k)))`` which is free
    of cancellation and tends to ``k (n-k) / n`` as ``beta -> 0``.
    """
    beta = _check_beta(beta)
    n, k = params.n, params.k
    kk = k * (n - k)
    if beta == 0:
        return Fraction(kk, n)
    c = math.expm1(beta)
    if c < _BETA_FLAT:
        return kk / n
    return 2.0 * kk / (n + math.sqrt(n * n + 4.0 * c * kk))


def equilibrium_distance_textbook(params: JohnsonParams, beta: float) -> float:
    """The same root via ``(-n + sqrt(n**2 + 4 c k (n-k))) / (2 c)``, ``c = e**beta - 1``."""
    beta = _check_beta(beta)
    if beta == 0:
        raise DomainError("the quadratic-formula form is undefined at beta = 0")
    n, k = params.n, params.k
    c = math.exp(beta) - 1.0
    return (-n + math.sqrt(n * n + 4.0 * c * k * (n - k))) / (2.0 * c)


def drift_profile(chain: DistanceChain) -> DriftProfile:
    drift = tuple(a - b for a, b in zip(chain.p, chain.q))
    variance = tuple((a + b) - (a - b) ** 2 for a, b in zip(chain.p, chain.q))
    eq = equilibrium_distance(chain.params, chain.beta)
    return DriftProfile(drift, variance, eq, 0 < eq < chain.params.d_max)


def mean_reversion_form(params: JohnsonParams, d: int) -> Fraction:
    """Flat-objective drift written as ``-(n / (k (n-k))) (d - d*)``."""
    params.require_chain()
    params.check_distance(d)
    return -Fraction(params.n, params.degree) * (d - equilibrium_distance(params, 0.0))


def detailed_balance_check(params: JohnsonParams) -> list[tuple[Fraction, Fraction]]:
    """Pairs ``(|shell i| p_i, |shell i+1| q_{i+1})`` for the flat chain; equal pairwise."""
    chain = build_chain(params, 0.0)
    return [
        (shell_size(params, i) * chain.p[i], shell_size(params, i + 1) * chain.q[i + 1])
        for i in range(params.d_max)
    ]


def entropy_gradient_diagnostic(params: JohnsonParams, d: int) -> tuple[float, float]:
    """``log(p_d / q_d)`` next to ``S(d+1) - S(d-1)``.

    The two are reported side by side and are generally *not* equal:
    ``p_d / q_d = (k-d)(n-k-d) / d**2`` whereas
    ``|shell d+1| / |shell d-1|`` is a product of two adjacent-shell ratios.
    """
    params.require_chain()
    if not 1 <= d <= params.d_max - 1:
        raise DomainError(f"diagnostic defined for 1 <= d <= {params.d_max - 1}, got {d}")
    log_ratio = math.log(up_probability(params, d) / down_probability(params, d))
    entropy_diff = math.log(Fraction(shell_size(params, d + 1), shell_size(params, d - 1)))
    return log_ratio, entropy_diff
