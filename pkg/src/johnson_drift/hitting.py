"""Expected hitting times of the target for the swap walk on J(n, k).

Starting ``m`` swaps away, the flat walk needs on average

    h_m = sum_{i=1..m} (1 / (q_i |shell i|)) * sum_{j=i..d_max} |shell j|

steps.  Under Metropolis guidance the inner terms pick up a factor
``exp(-beta (j - i))`` while ``q_i`` keeps its flat value, because inward
moves are always accepted.

Both are evaluated by a single backward pass over the tail sums.  The exact
path works in ``Fraction``; the log path keeps every quantity as a natural
log so that J(200, 40), whose shells reach ~1e42, stays well inside double
range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .chain import _check_beta, down_probability
from .errors import DomainError
from .shells import EXACT_CUTOFF, JohnsonParams, log_shell_sizes, shell_sizes


def _exact_increments(params: JohnsonParams) -> list[Fraction]:
    """``h_i - h_{i-1}`` for i = 1..d_max, exactly."""
    sizes = shell_sizes(params)
    d_max = params.d_max
    tail = 0
    steps = [Fraction(0)] * (d_max + 1)
    for i in range(d_max, 0, -1):
        tail += sizes[i]
        steps[i] = tail / (down_probability(params, i) * sizes[i])
    return steps[1:]


def _log_increments(params: JohnsonParams, beta: float, exact_cutoff: int) -> np.ndarray:
    """Natural logs of ``h_i - h_{i-1}`` for i = 1..d_max."""
    log_sizes = np.asarray(log_shell_sizes(params, exact_cutoff))
    d = np.arange(params.d_max + 1)
    # log sum_{j>=i} |shell j| e^{-beta j}, accumulated from the far end
    tail = np.logaddexp.accumulate((log_sizes - beta * d)[::-1])[::-1]
    log_q = 2.0 * np.log(d[1:]) - math.log(params.degree)
    return tail[1:] + beta * d[1:] - log_q - log_sizes[1:]


def _log_prefix_sums(log_terms: np.ndarray) -> np.ndarray:
    """``log(sum(exp(log_terms[:m])))`` for each m, using fsum at a common scale."""
    out = np.empty(len(log_terms))
    for m in range(1, len(log_terms) + 1):
        head = log_terms[:m]
        top = float(head.max())
        out[m - 1] = top + math.log(math.fsum(np.exp(head - top).tolist()))
    return out


@dataclass(frozen=True)
class HittingTimeTable:
    params: JohnsonParams
    beta: float
    log_h: tuple[float, ...]
    h_float: tuple[float, ...]
    iid_baseline: int
    h: Optional[tuple[Fraction, ...]] = None

    @property
    def exact(self) -> bool:
        return self.h is not None


def hitting_time_table(
    params: JohnsonParams,
    beta: float = 0.0,
    exact: Optional[bool] = None,
    exact_cutoff: int = EXACT_CUTOFF,
) -> HittingTimeTable:
    """Expected hitting times from every starting distance ``m = 0..d_max``.

    Exact rationals are attached when ``beta == 0`` and either ``exact`` is
    true or ``n`` is within ``exact_cutoff``.
    """
    params.require_chain()
    beta = _check_beta(beta)
    if exact is None:
        exact = params.n <= exact_cutoff
    if exact and beta != 0:
        raise DomainError("exact hitting times require beta == 0")
    log_h = [-math.inf] + _log_prefix_sums(_log_increments(params, beta, exact_cutoff)).tolist()
    h_exact = None
    if exact:
        h_exact = [Fraction(0)]
        for step in _exact_increments(params):
            h_exact.append(h_exact[-1] + step)
        # logs straight from the rationals are the most accurate available
        log_h = [-math.inf] + [_log_fraction(v) for v in h_exact[1:]]
        h_exact = tuple(h_exact)
    if h_exact is not None:
        h_float = [_fraction_to_float(v) for v in h_exact]
    else:
        h_float = [0.0] + [_safe_exp(v) for v in log_h[1:]]
    return HittingTimeTable(
        params=params,
        beta=beta,
        log_h=tuple(log_h),
        h_float=tuple(h_float),
        iid_baseline=iid_baseline(params),
        h=h_exact,
    )


def _log_fraction(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def _fraction_to_float(x: Fraction) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def hitting_time_rw(params: JohnsonParams, m: int, exact_cutoff: int = EXACT_CUTOFF) -> Fraction:
    """Exact expected hitting time of the flat walk from distance ``m``."""
    params.require_chain()
    params.check_distance(m)
    if params.n > exact_cutoff:
        raise DomainError(
            f"n={params.n} exceeds the exact cutoff {exact_cutoff}; "
            "raise exact_cutoff or use log_hitting_time"
        )
    return sum(_exact_increments(params)[:m], Fraction(0))


def log_hitting_time(
    params: JohnsonParams, m: int, beta: float = 0.0, exact_cutoff: int = EXACT_CUTOFF
) -> float:
    """Natural log of the expected hitting time from ``m``, evaluated in log space."""
    params.require_chain()
    params.check_distance(m)
    beta = _check_beta(beta)
    if m == 0:
        return -math.inf
    return float(_log_prefix_sums(_log_increments(params, beta, exact_cutoff)[:m])[-1])


def hitting_time_metropolis(
    params: JohnsonParams, beta: float, m: int, exact_cutoff: int = EXACT_CUTOFF
) -> float:
    """Expected hitting time from ``m`` when outward moves pass with ``exp(-beta)``."""
    return _safe_exp(log_hitting_time(params, m, beta, exact_cutoff))


def iid_baseline(params: JohnsonParams) -> int:
    """Expected draws until uniform IID sampling of k-subsets hits the target."""
    return math.comb(params.n, params.k)


def log_ratio_vs_iid(params: JohnsonParams, m: int) -> float:
    """``log(h_m / C(n, k))`` for the flat walk.

    At ``m = 1`` the ratio is ``1 - 1/C(n, k)``, far closer to one than a
    double can resolve for large instances, so the ratio is formed exactly
    and passed through ``log1p``.
    """
    params.require_chain()
    params.check_distance(m)
    if m == 0:
        raise DomainError("the ratio is zero at m = 0; its log is undefined")
    h = sum(_exact_increments(params)[:m], Fraction(0))
    excess = h / iid_baseline(params) - 1
    if abs(excess) < 0.5:
        return math.log1p(excess)
    return _log_fraction(h) - math.log(iid_baseline(params))


def binary_entropy(alpha: float) -> float:
    """Binary entropy in nats."""
    a = float(alpha)
    if not 0 < a < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return -a * math.log(a) - (1 - a) * math.log1p(-a)


def entropy_scaling_trend(alpha: Fraction, n_list: Sequence[int]) -> list[tuple[int, float]]:
    """``(n, log h_{d_max} / n)`` at fixed ratio ``k / n = alpha``."""
    alpha = Fraction(alpha)
    out = []
    for n in n_list:
        k = alpha * n
        if k.denominator != 1:
            raise DomainError(f"alpha * n = {k} is not an integer for n = {n}")
        params = JohnsonParams(n, int(k))
        params.require_chain()
        out.append((n, log_hitting_time(params, params.d_max) / n))
    return out
