"""Monte Carlo simulation of the swap walk and of its lumped distance chain.

Each trajectory draws from its own PCG64 stream seeded by
``substream_seed(base_seed, index)``.  Results therefore do not depend on
how trajectories are spread over worker processes.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .chain import DistanceChain, _check_beta
from .errors import DomainError
from .shells import JohnsonParams

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

FULL_STATE = "full_state"
LUMPED = "lumped"

# draws are generated in chunks; absorbing runs start small and grow
_FIRST_CHUNK = 64
_MAX_CHUNK = 4096


def splitmix64(x: int) -> int:
    """The splitmix64 output finalizer."""
    z = (x + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def substream_seed(base_seed: int, index: int) -> int:
    return splitmix64((splitmix64(base_seed & _MASK64) + index * _GOLDEN) & _MASK64)


def substream_rng(base_seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(substream_seed(base_seed, index)))


class SubsetState:
    """A k-subset of ``range(n)`` with O(1) uniform swap proposals.

    ``mask`` is the bit-set; ``members`` and ``nonmembers`` are index lists
    that partition ``range(n)`` and are kept in step with the mask.
    """

    __slots__ = ("n", "mask", "members", "nonmembers")

    def __init__(self, n: int, members: Sequence[int]):
        chosen = sorted(set(int(i) for i in members))
        if len(chosen) != len(members):
            raise DomainError("duplicate members")
        if chosen and not (0 <= chosen[0] and chosen[-1] < n):
            raise DomainError(f"members must lie in range({n})")
        self.n = n
        self.members = list(chosen)
        mask = 0
        for i in chosen:
            mask |= 1 << i
        self.mask = mask
        self.nonmembers = [i for i in range(n) if not mask >> i & 1]

    @classmethod
    def target(cls, params: JohnsonParams) -> "SubsetState":
        """The canonical target ``{0, ..., k-1}``."""
        return cls(params.n, range(params.k))

    @classmethod
    def at_distance(cls, target: "SubsetState", m: int) -> "SubsetState":
        """Swap the first ``m`` target members for the first ``m`` outsiders."""
        members, outside = sorted(target.members), sorted(target.nonmembers)
        if not 0 <= m <= min(len(members), len(outside)):
            raise DomainError(f"no subset at distance {m} from the target")
        return cls(target.n, members[m:] + outside[:m])

    @property
    def k(self) -> int:
        return len(self.members)

    def contains(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    def swap(self, member_pos: int, nonmember_pos: int) -> None:
        a = self.members[member_pos]
        b = self.nonmembers[nonmember_pos]
        self.members[member_pos] = b
        self.nonmembers[nonmember_pos] = a
        self.mask ^= (1 << a) | (1 << b)

    def copy(self) -> "SubsetState":
        other = object.__new__(SubsetState)
        other.n = self.n
        other.mask = self.mask
        other.members = list(self.members)
        other.nonmembers = list(self.nonmembers)
        return other

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SubsetState) and (self.n, self.mask) == (other.n, other.mask)

    def __hash__(self) -> int:
        return hash((self.n, self.mask))

    def __repr__(self) -> str:
        return f"SubsetState(n={self.n}, members={sorted(self.members)})"


def distance(x: SubsetState, target: SubsetState) -> int:
    """Swap distance: the number of members of ``x`` missing from ``target``."""
    if x.n != target.n or x.k != target.k:
        raise DomainError("states belong to different Johnson graphs")
    return bin(x.mask & ~target.mask).count("1")


def step(state: SubsetState, beta: float, target: SubsetState, rng: np.random.Generator) -> SubsetState:
    """One Metropolis step against ``f(x) = distance(x, target)``, in place.

    A uniform (member, non-member) swap is proposed.  It is accepted unless
    it moves away from the target, in which case it passes with probability
    ``exp(-beta)``.  ``beta == 0`` is the plain random walk.
    """
    i = int(rng.integers(state.k))
    j = int(rng.integers(state.n - state.k))
    u = rng.random()
    if beta > 0:
        out_in_target = target.contains(state.members[i])
        in_in_target = target.contains(state.nonmembers[j])
        if out_in_target and not in_in_target and u >= math.exp(-beta):
            return state
    state.swap(i, j)
    return state


@dataclass(frozen=True)
class WalkConfig:
    params: JohnsonParams
    beta: float = 0.0
    steps: int = 500
    trajectories: int = 100
    base_seed: int = 0
    start_distance: int = 1
    mode: str = FULL_STATE
    absorbing: bool = False
    store_paths: bool = True
    workers: int = 1

    def __post_init__(self) -> None:
        _check_beta(self.beta)
        self.params.check_distance(self.start_distance)
        if self.steps < 1 or self.trajectories < 1:
            raise DomainError("steps and trajectories must be positive")
        if self.mode not in (FULL_STATE, LUMPED):
            raise DomainError(f"unknown mode {self.mode!r}")
        if not 0 <= self.base_seed <= _MASK64:
            raise DomainError("base_seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")


@dataclass
class TrajectoryBatch:
    config: WalkConfig
    mean_path: np.ndarray
    std_path: np.ndarray
    hit_times: list[Optional[int]]
    distances: Optional[np.ndarray] = None
    # transitions from d with delta -1/0/+1 at index 3*d + delta + 1; kept so
    # drift can be estimated without the full path matrix
    transition_counts: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def n_trajectories(self) -> int:
        return len(self.hit_times)


def _path_dtype(d_max: int):
    return np.uint8 if d_max < 256 else np.int32


def _run_full_state(params, beta, steps, start, absorbing, rng, target) -> tuple[list, Optional[int]]:
    n, k = params.n, params.k
    inside, outside = target
    in_target = [False] * n
    for i in inside:
        in_target[i] = True
    # start: first `start` target members swapped out for the first outsiders
    members = inside[start:] + outside[:start]
    nonmembers = inside[:start] + outside[start:]
    accept = math.exp(-beta)
    guided = beta > 0

    path = [start] * (steps + 1)
    d = start
    hit = 0 if start == 0 else None
    t = 0
    chunk = _FIRST_CHUNK if absorbing else _MAX_CHUNK
    while t < steps and not (absorbing and hit is not None):
        size = min(chunk, steps - t)
        ii = rng.integers(0, k, size).tolist()
        jj = rng.integers(0, n - k, size).tolist()
        uu = rng.random(size).tolist()
        for s in range(size):
            pi, pj = ii[s], jj[s]
            a = members[pi]
            b = nonmembers[pj]
            ta, tb = in_target[a], in_target[b]
            if ta and not tb:
                if guided and uu[s] >= accept:
                    t += 1
                    path[t] = d
                    continue
                d += 1
            elif tb and not ta:
                d -= 1
            members[pi] = b
            nonmembers[pj] = a
            t += 1
            path[t] = d
            if d == 0 and hit is None:
                hit = t
                if absorbing:
                    break
        chunk = min(2 * chunk, _MAX_CHUNK)
    if absorbing and hit is not None:
        path[hit:] = [0] * (steps + 1 - hit)
    return path, hit


def _run_lumped(p, q, steps, start, absorbing, rng) -> tuple[list, Optional[int]]:
    path = [start] * (steps + 1)
    d = start
    hit = 0 if start == 0 else None
    t = 0
    chunk = _FIRST_CHUNK if absorbing else _MAX_CHUNK
    while t < steps and not (absorbing and hit is not None):
        size = min(chunk, steps - t)
        for u in rng.random(size).tolist():
            if u < q[d]:
                d -= 1
            elif u < q[d] + p[d]:
                d += 1
            t += 1
            path[t] = d
            if d == 0 and hit is None:
                hit = t
                if absorbing:
                    break
        chunk = min(2 * chunk, _MAX_CHUNK)
    if absorbing and hit is not None:
        path[hit:] = [0] * (steps + 1 - hit)
    return path, hit


_BLOCK = 512


def _simulate_range(config: WalkConfig, payload, lo: int, hi: int):
    """Run trajectories ``lo..hi-1``; returns integer aggregates, so merging is exact."""
    params = config.params
    steps = config.steps
    d_max = params.d_max
    total = np.zeros(steps + 1, dtype=np.int64)
    total_sq = np.zeros(steps + 1, dtype=np.int64)
    counts = np.zeros(3 * (d_max + 1), dtype=np.int64)
    hits: list[Optional[int]] = []
    paths = [] if config.store_paths else None
    time_index = np.arange(steps)
    for block_lo in range(lo, hi, _BLOCK):
        block = []
        block_hits = []
        for index in range(block_lo, min(block_lo + _BLOCK, hi)):
            rng = substream_rng(config.base_seed, index)
            if config.mode == FULL_STATE:
                path, hit = _run_full_state(
                    params, config.beta, steps, config.start_distance, config.absorbing, rng, payload
                )
            else:
                p, q = payload
                path, hit = _run_lumped(p, q, steps, config.start_distance, config.absorbing, rng)
            block.append(path)
            block_hits.append(hit)
        arr = np.array(block, dtype=np.int64)
        total += arr.sum(axis=0)
        total_sq += (arr * arr).sum(axis=0)
        # transitions Y_t -> Y_{t+1}; absorbing rows stop counting at the hit
        keys = arr[:, :-1] * 3 + (np.diff(arr, axis=1) + 1)
        if config.absorbing:
            ends = np.array([steps if h is None else h for h in block_hits])
            keys = keys[time_index[None, :] < ends[:, None]]
        counts += np.bincount(keys.ravel(), minlength=counts.size)
        hits.extend(block_hits)
        if paths is not None:
            paths.append(arr.astype(_path_dtype(d_max)))
    return total, total_sq, hits, paths, counts


def _run(config: WalkConfig, payload) -> TrajectoryBatch:
    n_traj = config.trajectories
    workers = min(config.workers, n_traj)
    bounds = np.linspace(0, n_traj, workers + 1).astype(int).tolist()
    ranges = list(zip(bounds[:-1], bounds[1:]))
    if workers == 1:
        parts = [_simulate_range(config, payload, 0, n_traj)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_simulate_range, config, payload, lo, hi) for lo, hi in ranges]
            parts = [f.result() for f in futures]

    # merge in trajectory order; integer sums make the result scheduling-free
    total = np.zeros(config.steps + 1, dtype=np.int64)
    total_sq = np.zeros(config.steps + 1, dtype=np.int64)
    counts = np.zeros(3 * (config.params.d_max + 1), dtype=np.int64)
    hits: list[Optional[int]] = []
    paths: list[np.ndarray] = []
    for part_total, part_sq, part_hits, part_paths, part_counts in parts:
        total += part_total
        total_sq += part_sq
        counts += part_counts
        hits.extend(part_hits)
        if part_paths is not None:
            paths.extend(part_paths)
    mean = total / n_traj
    std = np.sqrt(np.maximum(total_sq / n_traj - mean * mean, 0.0))
    return TrajectoryBatch(
        config=config,
        mean_path=mean,
        std_path=std,
        hit_times=hits,
        distances=np.vstack(paths) if config.store_paths else None,
        transition_counts=counts,
    )


def simulate_batch(config: WalkConfig, target: Optional[SubsetState] = None) -> TrajectoryBatch:
    """Simulate ``config.trajectories`` independent swap walks on J(n, k).

    The target defaults to ``{0, ..., k-1}``.  Each walk starts from the
    subset ``SubsetState.at_distance(target, start_distance)``.
    """
    if config.mode != FULL_STATE:
        raise DomainError("simulate_batch runs the full-state walk; use simulate_lumped")
    if target is None:
        target = SubsetState.target(config.params)
    if (target.n, target.k) != (config.params.n, config.params.k):
        raise DomainError("target does not match the configured instance")
    return _run(config, (sorted(target.members), sorted(target.nonmembers)))


def simulate_lumped(config: WalkConfig, chain: DistanceChain) -> TrajectoryBatch:
    """Simulate the distance chain directly from its (p, q, r) rows."""
    if chain.params != config.params or chain.beta != float(config.beta):
        raise DomainError("chain and config describe different dynamics")
    if config.mode != LUMPED:
        config = _replace_mode(config, LUMPED)
    p, q, _ = chain.as_floats()
    return _run(config, (p, q))


def _replace_mode(config: WalkConfig, mode: str) -> WalkConfig:
    from dataclasses import replace

    return replace(config, mode=mode)


class DriftEstimate(NamedTuple):
    d: int
    mean: float
    count: int
    variance: float


def empirical_drift(batch: TrajectoryBatch) -> list[DriftEstimate]:
    """Sample mean of ``Y_{t+1} - Y_t`` grouped by ``Y_t``.

    In absorbing runs steps after the first hit are excluded.
    """
    if batch.n_trajectories == 0:
        raise DomainError("empty batch")
    out = []
    for d, (down, stay, up) in enumerate(batch.transition_counts.reshape(-1, 3).tolist()):
        count = down + stay + up
        if count == 0:
            continue
        mean = (up - down) / count
        second = (up + down) / count
        out.append(DriftEstimate(d, mean, count, second - mean * mean))
    return out


def occupancy(path: np.ndarray, d_max: int, burn_in: int = 0) -> np.ndarray:
    """Fraction of time indices spent at each distance after ``burn_in``."""
    counts = np.bincount(np.asarray(path[burn_in:], dtype=np.int64), minlength=d_max + 1)
    return counts / counts.sum()
