'''Public queue operations against a sorted-list reference.'''

import math
import random

import pytest
from hypothesis import settings, strategies as st
from hypothesis.stateful import (Bundle, RuleBasedStateMachine, consumes,
                                 invariant, rule)

from optheap import (AliasingError, DismissedQueueError, EmptyQueueError,
                     Node, NotEmptyError, PriorityQueue, meld)
from optheap.harness import validate_structure


def build(keys):
    q = PriorityQueue()
    nodes = [Node(k) for k in keys]
    for x in nodes:
        q.insert(x)
    return q, nodes


def drain(q):
    out = []
    while q:
        out.append(q.delete_min().element)
    return out


# Construction and teardown


def test_new_queue_is_empty():
    q = PriorityQueue()
    assert len(q) == 0 and not q
    with pytest.raises(EmptyQueueError):
        q.find_min()
    with pytest.raises(EmptyQueueError):
        q.delete_min()
    q.destroy()


def test_destroy_nonempty_fails():
    q, _ = build([1])
    with pytest.raises(NotEmptyError):
        q.destroy()


def test_destroy_after_drain():
    q, _ = build(range(50))
    drain(q)
    q.destroy()
    with pytest.raises(DismissedQueueError):
        q.insert(Node(1))


# find_min and insert


def test_find_min_of_three():
    q, nodes = build([5, 3, 7])
    assert q.find_min() is nodes[1]


def test_find_min_single():
    q, nodes = build([4])
    assert q.find_min() is nodes[0]


def test_insert_into_empty_becomes_root():
    q = PriorityQueue()
    x = Node(9)
    q.insert(x)
    assert q.t1 is x


def test_insert_smaller_takes_the_root():
    q, _ = build([5, 8])
    x = Node(1)
    q.insert(x)
    assert q.t1 is x and q.find_min() is x
    assert validate_structure(q) == []


def test_insert_uses_few_comparisons():
    q = PriorityQueue()
    worst = 0
    rng = random.Random(2)
    for _ in range(3000):
        before = q.cmp.count
        q.insert(Node(rng.randrange(10 ** 6)))
        worst = max(worst, q.cmp.count - before)
    assert worst <= 3


def test_insert_requires_detached_node():
    q, nodes = build([1, 2])
    with pytest.raises(AssertionError):
        q.insert(nodes[1])


# decrease


def test_decrease_below_min_takes_the_root():
    q, nodes = build(range(10, 40))
    leaf = nodes[-1]
    q.decrease(leaf, 1)
    assert q.find_min() is leaf and q.t1 is leaf
    assert validate_structure(q) == []


def test_decrease_child_of_root_records_nothing():
    q, nodes = build(range(10, 20))
    child = q.t1.last_child
    q.decrease(child, child.element - 1)
    assert child.vprev is None
    assert q.vs.n_active + q.vs.n_inactive == 0


def test_decrease_to_equal_value():
    q, nodes = build([3, 6, 9])
    q.decrease(nodes[2], 9)
    assert drain(q) == [3, 6, 9]


def test_decrease_to_larger_value_fails():
    q, nodes = build([3, 6])
    with pytest.raises(ValueError):
        q.decrease(nodes[0], 4)


# delete_min and delete


def test_drain_is_sorted():
    rng = random.Random(7)
    keys = [rng.randrange(1000) for _ in range(2000)]
    q, _ = build(keys)
    assert drain(q) == sorted(keys)


def test_delete_min_single():
    q, nodes = build([5])
    assert q.delete_min() is nodes[0]
    assert len(q) == 0 and nodes[0].detached()


def test_delete_of_min_matches_delete_min():
    keys = [8, 3, 5, 1, 9, 2]
    q1, _ = build(keys)
    q2, _ = build(keys)
    q1.delete(q1.find_min())
    q2.delete_min()
    assert drain(q1) == drain(q2)


def test_delete_max_keeps_min():
    q, nodes = build([4, 2, 9, 7])
    x = q.delete(nodes[2])
    assert x is nodes[2] and x.detached()
    assert q.find_min() is nodes[1]
    assert drain(q) == [2, 4, 7]


def test_delete_in_singleton_queue():
    q, nodes = build([1])
    q.delete(nodes[0])
    assert len(q) == 0


def test_returned_handles_are_detached():
    rng = random.Random(3)
    q, nodes = build(rng.sample(range(500), 300))
    for x in rng.sample(nodes, 100):
        y = q.delete(x)
        assert y is x and x.detached()
    while q:
        assert q.delete_min().detached()


# meld


def test_meld_with_empty():
    q, _ = build([4, 1, 3])
    e = PriorityQueue()
    m = meld(e, q)
    assert len(m) == 3 and drain(m) == [1, 3, 4]


def test_meld_sizes_five_and_nine():
    a, _ = build([10, 20, 30, 40, 50])
    b, _ = build([5, 15, 25, 35, 45, 55, 65, 75, 85])
    m = meld(a, b)
    assert len(m) == 14 and m.find_min().element == 5
    assert validate_structure(m) == []
    assert drain(m) == sorted([10, 20, 30, 40, 50, 5, 15, 25, 35, 45, 55,
                               65, 75, 85])


def test_meld_with_itself_fails():
    q, _ = build([1])
    with pytest.raises(AliasingError):
        meld(q, q)


def test_melded_queues_are_dismissed():
    a, _ = build([1])
    b, _ = build([2])
    meld(a, b)
    for q in (a, b):
        with pytest.raises(DismissedQueueError):
            q.find_min()


def test_second_tree_drains_without_melds():
    rng = random.Random(4)
    small, _ = build([0, 1, 2])
    big, _ = build([rng.randrange(100, 10 ** 5) for _ in range(900)])
    m = meld(small, big)
    assert m.t2 is not None and m.t1.rank < m.t2.rank
    nodes = list(_all_nodes(m))
    steps = 0
    while m.t2 is not None:
        x = rng.choice(nodes)
        m.decrease(x, x.element)
        steps += 1
        assert steps < 100
    assert validate_structure(m) == []
    assert drain(m) == sorted(v.element for v in nodes)


def _all_nodes(q):
    from optheap.core import iter_subtree
    for r in q.roots():
        yield from iter_subtree(r)


def test_transfer_step_without_second_tree_is_noop():
    q, _ = build([1, 2, 3])
    before = q.cmp.count
    q.transfer_step()
    assert q.cmp.count == before and q.t2 is None


def test_max_rank_is_logarithmic():
    rng = random.Random(9)
    q, nodes = build([rng.randrange(10 ** 6) for _ in range(1000)])
    for _ in range(300):
        x = rng.choice(nodes)
        if x.detached():
            continue
        q.decrease(x, x.element - rng.randrange(1000))
    q.delete_min()
    top = max(v.rank for v in _all_nodes(q))
    assert top <= 1.44 * math.log2(1000)


def test_space_stays_linear_after_melds():
    rng = random.Random(5)
    qs = [build([rng.randrange(100) for _ in range(rng.randrange(1, 30))])[0]
          for _ in range(64)]
    while len(qs) > 1:
        a, b = qs.pop(), qs.pop()
        qs.insert(0, meld(a, b))
    q = qs[0]
    assert q.space() <= 8 * len(q) + 64


# Stateful comparison with a sorted-list reference


class QueueMachine(RuleBasedStateMachine):
    '''Several queues, all operations, checked against Python lists.'''

    handles = Bundle('handles')

    def __init__(self):
        super().__init__()
        self.queues = [PriorityQueue(), PriorityQueue()]
        self.ref = [[], []]
        self.owner = {}

    @rule(target=handles, which=st.integers(0, 1), key=st.integers(-50, 50))
    def insert(self, which, key):
        x = Node(key)
        self.queues[which].insert(x)
        self.ref[which].append(key)
        self.owner[id(x)] = which
        return x

    @rule(which=st.integers(0, 1))
    def delete_min(self, which):
        q, ref = self.queues[which], self.ref[which]
        if not ref:
            with pytest.raises(EmptyQueueError):
                q.delete_min()
            return
        x = q.delete_min()
        assert x.element == min(ref)
        ref.remove(x.element)
        self.owner.pop(id(x))

    @rule(x=handles, by=st.integers(0, 30))
    def decrease(self, x, by):
        which = self.owner.get(id(x))
        if which is None:
            return
        ref = self.ref[which]
        ref.remove(x.element)
        self.queues[which].decrease(x, x.element - by)
        ref.append(x.element)

    @rule(x=consumes(handles))
    def delete(self, x):
        which = self.owner.pop(id(x), None)
        if which is None:
            return
        self.queues[which].delete(x)
        self.ref[which].remove(x.element)

    @rule(into=st.integers(0, 1))
    def meld(self, into):
        m = meld(self.queues[0], self.queues[1])
        merged = self.ref[0] + self.ref[1]
        self.queues = [PriorityQueue(), PriorityQueue()]
        self.ref = [[], []]
        self.queues[into] = m
        self.ref[into] = merged
        for k in self.owner:
            self.owner[k] = into

    @invariant()
    def matches_reference(self):
        for q, ref in zip(self.queues, self.ref):
            assert len(q) == len(ref)
            if ref:
                assert q.find_min().element == min(ref)
            assert validate_structure(q) == []


QueueMachine.TestCase.settings = settings(max_examples=60,
                                          stateful_step_count=60,
                                          deadline=None)
TestQueueMachine = QueueMachine.TestCase
