import json
import math
from fractions import Fraction

import pytest

from conftest import naive_hitting_times
from johnson_drift.errors import DomainError, ResourceError
from johnson_drift.hitting import hitting_time_metropolis, hitting_time_table
from johnson_drift.oracle import (
    Report,
    enumerate_graph,
    find_triangle,
    oracle_report,
    solve_hitting_exact,
    solve_hitting_lumped,
    verify_lumpability,
    verify_shell_counts,
    verify_structure,
)
from johnson_drift.shells import JohnsonParams


@pytest.mark.parametrize("n,k,vertices,degree", [(5, 2, 10, 6), (7, 3, 35, 12), (3, 1, 3, 2)])
def test_enumeration_sizes(n, k, vertices, degree):
    g = enumerate_graph(JohnsonParams(n, k))
    assert len(g.vertices) == vertices
    assert {len(a) for a in g.adjacency} == {degree}


def test_j31_is_a_triangle():
    g = enumerate_graph(JohnsonParams(3, 1))
    assert find_triangle(g) is not None
    assert all(len(set(a)) == 2 for a in g.adjacency)


def test_shell_counts_j63():
    g = enumerate_graph(JohnsonParams(6, 3))
    counts = [g.shell_of.count(d) for d in range(4)]
    assert counts == [1, 9, 9, 1]
    assert verify_shell_counts(g).passed


def test_j42_up_down_counts():
    g = enumerate_graph(JohnsonParams(4, 2))
    for v, nbrs in enumerate(g.adjacency):
        if g.shell_of[v] == 1:
            assert sum(g.shell_of[u] == 2 for u in nbrs) == 1
            assert sum(g.shell_of[u] == 0 for u in nbrs) == 1


def test_custom_target_and_members():
    params = JohnsonParams(5, 2)
    g = enumerate_graph(params, target=0b11000)
    assert g.members(g.target_index) == [3, 4]
    with pytest.raises(DomainError):
        enumerate_graph(params, target=0b111)


def test_caps():
    with pytest.raises(ResourceError):
        enumerate_graph(JohnsonParams(30, 15))
    g = enumerate_graph(JohnsonParams(7, 3))
    with pytest.raises(ResourceError):
        solve_hitting_exact(g, cap=10)


@pytest.mark.parametrize("n", range(2, 8))
def test_structure_and_lumpability_small(n):
    for k in range(1, n):
        g = enumerate_graph(JohnsonParams(n, k))
        assert verify_structure(g).passed
        assert verify_shell_counts(g).passed
        if (n, k) != (2, 1):
            assert verify_lumpability(g).passed


def test_solve_exact_j52():
    g = enumerate_graph(JohnsonParams(5, 2))
    assert solve_hitting_exact(g) == [0, 9, Fraction(21, 2)]
    assert solve_hitting_exact(g, 1.0)[1] == pytest.approx(6 + 3 / math.e, rel=1e-14)
    with pytest.raises(DomainError):
        solve_hitting_exact(g, -1.0)


@pytest.mark.parametrize("n,k", [(3, 1), (4, 2), (5, 2), (6, 3), (7, 3), (8, 3), (8, 4)])
def test_closed_form_equals_full_graph(n, k):
    params = JohnsonParams(n, k)
    g = enumerate_graph(params)
    assert list(hitting_time_table(params, exact=True).h) == solve_hitting_exact(g)


@pytest.mark.parametrize("n,k", [(4, 2), (5, 2), (6, 2), (7, 3)])
@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_metropolis_closed_form_equals_full_graph(n, k, beta):
    params = JohnsonParams(n, k)
    solved = solve_hitting_exact(enumerate_graph(params), beta)
    numpy_solved = naive_hitting_times(n, k, beta)
    for m in range(1, params.d_max + 1):
        closed = hitting_time_metropolis(params, beta, m)
        assert abs(closed - solved[m]) / solved[m] <= 1e-10
        assert numpy_solved[m] == pytest.approx(solved[m], rel=1e-9)


def test_lumped_solve():
    params = JohnsonParams(9, 4)
    assert solve_hitting_lumped(params) == list(hitting_time_table(params, exact=True).h)
    lumped = solve_hitting_lumped(params, 1.5)
    for m in range(1, 5):
        assert lumped[m] == pytest.approx(hitting_time_metropolis(params, 1.5, m), rel=1e-12)


def test_report_round_trip():
    report = oracle_report(JohnsonParams(5, 2))
    assert report.passed
    data = json.loads(report.to_json())
    assert data["passed"] is True
    names = [c["check"] for c in data["checks"]]
    assert any("Metropolis beta=1.0" in name for name in names)
    assert any(c["pass"] is None for c in data["checks"])
    assert "J(5,2)" in report.to_text()


def test_report_two_one_skips_chain():
    report = oracle_report(JohnsonParams(2, 1))
    assert report.passed
    assert any(c.passed is None and "skipped" in str(c.actual) for c in report.checks)


def test_report_failure_bookkeeping():
    r = Report("t")
    r.add("ok", 1, 1)
    r.add("bad", 1, 2)
    r.note("info", [1.0, 2.0])
    assert not r.passed
    assert [c.name for c in r.failures] == ["bad"]
