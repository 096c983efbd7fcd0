"""Shared brute-force helpers and the acceptance summary hook.

The helpers here deliberately avoid the package: subsets are frozensets,
neighbours are generated by literal set surgery and linear systems are
solved with ``fractions`` or numpy.
"""
import itertools
from fractions import Fraction

import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def naive_subsets(n, k):
    return [frozenset(c) for c in itertools.combinations(range(1, n + 1), k)]


def naive_neighbours(x, n):
    outside = set(range(1, n + 1)) - x
    return [frozenset((x - {a}) | {b}) for a in x for b in outside]


def naive_distance(x, y):
    return len(x - y)


def naive_shell_counts(n, k):
    target = frozenset(range(1, k + 1))
    counts = {}
    for x in naive_subsets(n, k):
        d = naive_distance(x, target)
        counts[d] = counts.get(d, 0) + 1
    return [counts[d] for d in sorted(counts)]


def naive_hitting_times(n, k, beta=0.0):
    """Per-shell expected hitting times of the full walk via numpy (floats)."""
    target = frozenset(range(1, k + 1))
    states = [s for s in naive_subsets(n, k) if s != target]
    index = {s: i for i, s in enumerate(states)}
    size = len(states)
    mat = np.eye(size)
    deg = k * (n - k)
    for s in states:
        i = index[s]
        d = naive_distance(s, target)
        for t in naive_neighbours(s, n):
            prob = 1.0 / deg
            if naive_distance(t, target) > d:
                prob *= np.exp(-beta)
            if t != target:
                mat[i, index[t]] -= prob
        # rejected proposals stay put
        stay = sum((1.0 / deg) * (1 - np.exp(-beta))
                   for t in naive_neighbours(s, n) if naive_distance(t, target) > d)
        mat[i, i] -= stay
    h = np.linalg.solve(mat, np.ones(size))
    shells = {}
    for s, v in zip(states, h):
        shells.setdefault(naive_distance(s, target), []).append(v)
    return [0.0] + [float(np.mean(shells[d])) for d in sorted(shells)]


def fraction_solve(mat, rhs):
    """Plain Gauss-Jordan over Fractions on dense lists."""
    a = [list(map(Fraction, row)) + [Fraction(b)] for row, b in zip(mat, rhs)]
    size = len(a)
    for c in range(size):
        piv = next(r for r in range(c, size) if a[r][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [v * inv for v in a[c]]
        for r in range(size):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [v - f * w for v, w in zip(a[r], a[c])]
    return [row[-1] for row in a]


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(label, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] {label}" + (f" :: {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
