'''Violation bookkeeping and the reduction cases.'''

import pytest

from optheap import core, queue as queue_mod, violations
from optheap.core import Node
from optheap.harness import Executor, validate_structure, workload
from optheap.violations import ViolationStructure

# Comparison budget of a single reduction.  Decrease-heavy and meld-heavy
# loads peak at 11 (the join cases), well inside it.
REDUCE_BUDGET = 20


def node(rank, key=0):
    x = Node(key)
    x.rank = rank
    return x


def sized(n):
    vs = ViolationStructure()
    vs.extend(n, n)
    return vs


def test_record_active_and_inactive():
    vs = sized(5)
    a, b = node(2), node(9)
    vs.record(a)
    vs.record(b)
    assert vs.is_active(a) and vs.is_inactive(b)
    assert vs.counts()[2] == 1 and vs.n_inactive == 1
    assert vs.validate() == []


def test_third_violation_makes_rank_reducible():
    vs = sized(5)
    xs = [node(2) for _ in range(3)]
    vs.record(xs[0])
    vs.record(xs[1])
    assert not vs.reduction_possible()
    vs.record(xs[2])
    assert vs.reduction_possible()
    assert set(vs.pick_triple()) == set(xs)
    vs.remove(xs[1])
    assert not vs.reduction_possible()
    assert vs.validate() == []


def test_equal_ranks_stay_consecutive():
    vs = sized(6)
    for r in (1, 3, 1, 3, 5, 1):
        vs.record(node(r))
    ranks = [x.rank for x in vs.active]
    runs = [r for k, r in enumerate(ranks) if k == 0 or ranks[k - 1] != r]
    assert len(runs) == len(set(runs))
    assert vs.validate() == []


def test_extend_is_capped_by_max_rank():
    vs = sized(5)
    vs.extend(4, 12)
    assert len(vs) == 9
    vs = sized(12)
    vs.extend(4, 12)
    assert len(vs) == 13
    vs.extend(4, 12)
    assert len(vs) == 13


def test_activate_inactive():
    vs = ViolationStructure()
    vs.extend(1, 0)
    xs = [node(1), node(4), node(4)]
    for x in xs:
        vs.record(x)
    assert vs.n_inactive == 3
    vs.extend(4, 4)
    vs.activate_inactive()
    counts = vs.counts()
    assert counts[1] == 1 and counts[4] == 2 and vs.n_inactive == 0
    assert vs.validate() == []
    vs.activate_inactive()
    assert vs.counts() == counts


def test_activate_before_array_is_large_enough_fails():
    vs = ViolationStructure()
    vs.record(node(3))
    with pytest.raises(AssertionError):
        vs.activate_inactive()


def test_reduction_possible_examples():
    vs = sized(4)
    for r in (0, 0, 3, 3):
        vs.record(node(r))
    assert not vs.reduction_possible()
    vs = sized(4)
    for _ in range(3):
        vs.record(node(3))
    assert vs.reduction_possible()


def test_contract_keeps_occupied_entries():
    vs = sized(8)
    vs.record(node(5))
    vs.contract(2)
    assert len(vs) == 6


class ReduceProbe:
    '''Wraps the reduction used by the queue to record per-call cost.'''

    def __init__(self, monkeypatch):
        self.calls = []
        real = violations.reduce

        def probe(q):
            before_cmp = q.cmp.count
            before = q.vs.n_active + q.vs.n_inactive
            case = real(q)
            after = q.vs.n_active + q.vs.n_inactive
            self.calls.append((case, q.cmp.count - before_cmp, after - before))
            problems = validate_structure(q)
            assert problems == [], (case, problems)
            return case

        monkeypatch.setattr(queue_mod, 'reduce', probe)


def test_reductions_on_decrease_heavy_load(monkeypatch):
    probe = ReduceProbe(monkeypatch)
    ex = Executor(check=True, validate_every=50)
    for op in workload('decrease-heavy', 600, seed=3):
        ex.apply(op)
    assert probe.calls
    cases = set()
    for case, comparisons, delta in probe.calls:
        assert comparisons <= REDUCE_BUDGET, (case, comparisons)
        # 'retry' means a simpler reduction was performed instead.
        assert delta <= -1, (case, delta)
        cases.add(case)
    assert {'1', '2', '4'} <= cases


def test_reduce_requires_a_reducible_rank():
    from optheap.queue import PriorityQueue
    q = PriorityQueue()
    q.insert(Node(1))
    with pytest.raises(AssertionError):
        violations.reduce(q)


def test_case_names_cover_tallies():
    assert set(violations.CASE_NAMES) >= {'1', '2', '3', '4', '5'}
    assert core.Ring().empty()
