"""Brute-force ground truth on small Johnson graphs.

Nothing in here uses the lumped chain or the closed forms: the graph is
enumerated vertex by vertex and hitting times come from solving the
first-step equations of the full walk.  The analytic modules are checked
against these results.
"""
from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Optional

import mpmath

from .errors import DomainError, ResourceError
from .shells import JohnsonParams

ENUMERATION_CAP = 100_000
SOLVE_CAP = 5_000


@dataclass(frozen=True)
class EnumeratedGraph:
    """All k-subsets of ``range(n)`` as bitmasks, with swap adjacency."""

    params: JohnsonParams
    vertices: tuple[int, ...]
    adjacency: tuple[tuple[int, ...], ...]
    shell_of: tuple[int, ...]
    target_index: int

    def members(self, v: int) -> list[int]:
        mask = self.vertices[v]
        return [i for i in range(self.params.n) if mask >> i & 1]


def enumerate_graph(
    params: JohnsonParams, target: Optional[int] = None, cap: int = ENUMERATION_CAP
) -> EnumeratedGraph:
    """Enumerate J(n, k); ``target`` is a bitmask, default ``{0, ..., k-1}``."""
    n, k = params.n, params.k
    if math.comb(n, k) > cap:
        raise ResourceError(f"C({n},{k}) = {math.comb(n, k)} exceeds the enumeration cap {cap}")
    if target is None:
        target = (1 << k) - 1
    vertices = tuple(sum(1 << i for i in c) for c in itertools.combinations(range(n), k))
    index = {mask: i for i, mask in enumerate(vertices)}
    if target not in index:
        raise DomainError("target is not a k-subset of range(n)")
    adjacency = []
    for mask in vertices:
        inside = [i for i in range(n) if mask >> i & 1]
        outside = [i for i in range(n) if not mask >> i & 1]
        adjacency.append(tuple(index[mask ^ (1 << a) ^ (1 << b)] for a in inside for b in outside))
    shell_of = tuple(bin(mask & ~target).count("1") for mask in vertices)
    return EnumeratedGraph(params, vertices, tuple(adjacency), shell_of, index[target])


@dataclass
class Check:
    name: str
    expected: Any
    actual: Any
    passed: Optional[bool]  # None marks a diagnostic that is reported, not judged


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, expected: Any, actual: Any, passed: Optional[bool] = None) -> None:
        if passed is None:
            passed = expected == actual
        self.checks.append(Check(name, expected, actual, passed))

    def note(self, name: str, values: Any) -> None:
        self.checks.append(Check(name, None, values, None))

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.passed is False]

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [
                {
                    "check": c.name,
                    "expected": _jsonable(c.expected),
                    "actual": _jsonable(c.actual),
                    "pass": c.passed,
                }
                for c in self.checks
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = [self.title]
        for c in self.checks:
            tag = {True: "PASS", False: "FAIL", None: "INFO"}[c.passed]
            if c.passed is None:
                lines.append(f"  [{tag}] {c.name}: {_jsonable(c.actual)}")
            else:
                lines.append(f"  [{tag}] {c.name}: expected {_jsonable(c.expected)}, got {_jsonable(c.actual)}")
        return "\n".join(lines)


def _jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, int) and abs(x) > 2**53:
        return str(x)
    return x


def verify_shell_counts(graph: EnumeratedGraph) -> Report:
    """Shell populations and per-vertex up/down neighbour counts."""
    params = graph.params
    n, k = params.n, params.k
    report = Report(f"shell counts J({n},{k})")
    counts = [0] * (params.d_max + 1)
    for d in graph.shell_of:
        counts[d] += 1
    expected = [math.comb(k, d) * math.comb(n - k, d) for d in range(params.d_max + 1)]
    report.add("shell populations", expected, counts)
    report.add("vertex count", math.comb(n, k), len(graph.vertices))
    bad_up = bad_down = bad_degree = 0
    for v, nbrs in enumerate(graph.adjacency):
        d = graph.shell_of[v]
        up = sum(1 for u in nbrs if graph.shell_of[u] == d + 1)
        down = sum(1 for u in nbrs if graph.shell_of[u] == d - 1)
        bad_up += up != (k - d) * (n - k - d)
        bad_down += down != d * d
        bad_degree += len(nbrs) != k * (n - k)
    report.add("vertices with wrong up-neighbour count", 0, bad_up)
    report.add("vertices with wrong down-neighbour count", 0, bad_down)
    report.add("vertices with degree != k(n-k)", 0, bad_degree)
    return report


def verify_structure(graph: EnumeratedGraph) -> Report:
    """Connectivity, an odd cycle, symmetry and regularity of the adjacency."""
    params = graph.params
    report = Report(f"structure J({params.n},{params.k})")
    seen = {graph.target_index}
    queue = deque([graph.target_index])
    while queue:
        v = queue.popleft()
        for u in graph.adjacency[v]:
            if u not in seen:
                seen.add(u)
                queue.append(u)
    report.add("connected", True, len(seen) == len(graph.vertices))
    edge_sets = [set(nbrs) for nbrs in graph.adjacency]
    symmetric = all(v in edge_sets[u] for v, nbrs in enumerate(graph.adjacency) for u in nbrs)
    report.add("adjacency symmetric", True, symmetric)
    single_swap = all(
        bin(graph.vertices[v] ^ graph.vertices[u]).count("1") == 2
        for v, nbrs in enumerate(graph.adjacency)
        for u in nbrs
    )
    report.add("neighbours differ by one swap", True, single_swap)
    degrees = {len(nbrs) for nbrs in graph.adjacency}
    report.add("regular (uniform stationary law)", True, len(degrees) == 1)
    if params.n >= 3:
        report.add("has a triangle (aperiodic)", True, find_triangle(graph) is not None)
    return report


def find_triangle(graph: EnumeratedGraph) -> Optional[tuple[int, int, int]]:
    edge_sets = [set(nbrs) for nbrs in graph.adjacency]
    for v, nbrs in enumerate(graph.adjacency):
        for u in nbrs:
            if u <= v:
                continue
            common = edge_sets[v] & edge_sets[u]
            for w in common:
                if w > u:
                    return v, u, w
    return None


def _step_probabilities(graph: EnumeratedGraph, v: int, beta, one, accept):
    """Exact one-step law from ``v`` as ``{target vertex: probability}``."""
    deg = len(graph.adjacency[v])
    share = one / deg
    law: dict[int, Any] = {}
    stay = one - one
    d = graph.shell_of[v]
    for u in graph.adjacency[v]:
        if beta and graph.shell_of[u] > d:
            law[u] = law.get(u, one - one) + share * accept
            stay += share * (one - accept)
        else:
            law[u] = law.get(u, one - one) + share
    if stay:
        law[v] = law.get(v, one - one) + stay
    return law


def verify_lumpability(graph: EnumeratedGraph) -> Report:
    """Every vertex moves to shells d-1, d, d+1 with the flat chain's probabilities."""
    params = graph.params
    n, k = params.n, params.k
    report = Report(f"lumpability J({n},{k})")
    deg = k * (n - k)
    mismatched = 0
    one = Fraction(1)
    for v in range(len(graph.vertices)):
        d = graph.shell_of[v]
        into = [Fraction(0)] * 3
        for u, prob in _step_probabilities(graph, v, 0, one, one).items():
            into[graph.shell_of[u] - d + 1] += prob
        expected = [Fraction(d * d, deg), 1 - Fraction(d * d + (k - d) * (n - k - d), deg),
                    Fraction((k - d) * (n - k - d), deg)]
        mismatched += into != expected
    report.add("vertices whose (q, r, p) differ from the shell law", 0, mismatched)
    return report


def _solve_sparse(rows: list[dict[int, Any]], rhs: list[Any]) -> list[Any]:
    """Gauss-Jordan elimination on dict rows; exact for Fractions.

    Works for any field type supporting + - * / (Fraction, mpmath.mpf).
    Pivots on the largest magnitude entry in the column for non-exact types.
    """
    size = len(rows)
    rows = [dict(r) for r in rows]
    rhs = list(rhs)
    exact = all(isinstance(x, Fraction) for r in rows for x in r.values())
    for col in range(size):
        candidates = [i for i in range(col, size) if rows[i].get(col)]
        if not candidates:
            raise ArithmeticError("singular first-step system")
        piv = candidates[0] if exact else max(candidates, key=lambda i: abs(rows[i][col]))
        rows[col], rows[piv] = rows[piv], rows[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        pivot_row = rows[col]
        inv = 1 / pivot_row[col]
        for j in list(pivot_row):
            pivot_row[j] = pivot_row[j] * inv
        rhs[col] = rhs[col] * inv
        for i in range(size):
            if i == col:
                continue
            factor = rows[i].get(col)
            if not factor:
                continue
            row = rows[i]
            for j, val in pivot_row.items():
                new = row.get(j, 0) - factor * val
                if new:
                    row[j] = new
                else:
                    row.pop(j, None)
            rhs[i] = rhs[i] - factor * rhs[col]
    return rhs


def solve_hitting_exact(
    graph: EnumeratedGraph, beta: float = 0.0, cap: int = SOLVE_CAP, dps: int = 50
) -> list:
    """Per-shell expected hitting times of the target from the full-state walk.

    ``beta == 0`` is solved in exact rationals; ``beta > 0`` (Metropolis
    against the distance) in ``dps``-digit mpmath arithmetic.  Raises if two
    vertices of the same shell disagree.
    """
    size = len(graph.vertices)
    if size > cap:
        raise ResourceError(f"{size} unknowns exceed the exact-solve cap {cap}")
    beta = float(beta)
    if beta < 0 or not math.isfinite(beta):
        raise DomainError(f"beta must be finite and >= 0, got {beta}")
    with mpmath.workdps(dps):
        if beta == 0:
            one, accept = Fraction(1), Fraction(1)
        else:
            one, accept = mpmath.mpf(1), mpmath.exp(-mpmath.mpf(beta))
        target = graph.target_index
        unknowns = [v for v in range(len(graph.vertices)) if v != target]
        col = {v: i for i, v in enumerate(unknowns)}
        rows, rhs = [], []
        for v in unknowns:
            row: dict[int, Any] = {col[v]: one}
            for u, prob in _step_probabilities(graph, v, beta, one, accept).items():
                if u == target:
                    continue
                row[col[u]] = row.get(col[u], 0) - prob
            rows.append({j: x for j, x in row.items() if x})
            rhs.append(one)
        solution = _solve_sparse(rows, rhs)

        by_shell: dict[int, Any] = {0: one - one}
        tol = None if beta == 0 else mpmath.mpf(10) ** (-(dps - 10))
        for v, value in zip(unknowns, solution):
            d = graph.shell_of[v]
            if d not in by_shell:
                by_shell[d] = value
            elif tol is None and by_shell[d] != value:
                raise ArithmeticError(f"shell {d} holds unequal hitting times")
            elif tol is not None and abs(by_shell[d] - value) > tol * abs(value):
                raise ArithmeticError(f"shell {d} holds unequal hitting times")
        values = [by_shell[d] for d in range(graph.params.d_max + 1)]
        if beta:
            return [float(x) for x in values]
        return values


def solve_hitting_lumped(params: JohnsonParams, beta: float = 0.0) -> list:
    """Fast path: first-step equations of the lumped chain (d_max unknowns)."""
    from .chain import build_chain

    chain = build_chain(params, beta)
    d_max = params.d_max
    rows, rhs = [], []
    for d in range(1, d_max + 1):
        row = {d - 1: 1 - chain.r[d]}
        if d > 1:
            row[d - 2] = -chain.q[d]
        if d < d_max:
            row[d] = -chain.p[d]
        rows.append({j: x for j, x in row.items() if x})
        rhs.append(Fraction(1) if chain.exact else 1.0)
    if not chain.exact:
        with mpmath.workdps(30):
            rows = [{j: mpmath.mpf(x) for j, x in r.items()} for r in rows]
            sol = [float(x) for x in _solve_sparse(rows, [mpmath.mpf(1)] * d_max)]
        return [0.0] + sol
    return [Fraction(0)] + _solve_sparse(rows, rhs)


def oracle_report(params: JohnsonParams, betas=(0.5, 1.0, 2.0), solve_cap: int = SOLVE_CAP) -> Report:
    """Every oracle check for one instance, compared against the analytic modules."""
    from .chain import detailed_balance_check, entropy_gradient_diagnostic
    from .hitting import hitting_time_metropolis, hitting_time_table

    n, k = params.n, params.k
    report = Report(f"J({n},{k})")
    graph = enumerate_graph(params)
    report.extend(verify_structure(graph))
    report.extend(verify_shell_counts(graph))
    if not params.supports_chain:
        report.note("chain checks", "skipped: J(2,1) is excluded")
        return report
    report.extend(verify_lumpability(graph))
    for i, (lhs, rhs) in enumerate(detailed_balance_check(params)):
        report.add(f"detailed balance i={i}", lhs, rhs)
    for d in range(1, params.d_max):
        report.note(f"log(p_d/q_d) vs S(d+1)-S(d-1) at d={d}", list(entropy_gradient_diagnostic(params, d)))
    if len(graph.vertices) > solve_cap:
        report.note("hitting-time solve", f"skipped: C({n},{k}) exceeds cap {solve_cap}")
        return report
    table = hitting_time_table(params, 0.0, exact=True)
    report.add("flat hitting times vs full-graph solve", list(table.h), solve_hitting_exact(graph, 0.0))
    for beta in betas:
        solved = solve_hitting_exact(graph, beta)
        closed = [0.0] + [hitting_time_metropolis(params, beta, m) for m in range(1, params.d_max + 1)]
        worst = max(abs(a - b) / b for a, b in zip(closed[1:], solved[1:]))
        report.add(f"Metropolis beta={beta} max relative error", "<= 1e-10", worst, worst <= 1e-10)
    return report
