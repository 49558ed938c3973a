'''Oracle, validator, trace format, fuzzing and measurement.'''

import json

import pytest

from optheap import Node, PriorityQueue
from optheap.harness import (Executor, OracleQueue, TraceError, WORKLOADS,
                             delete_min_bound, format_op, fuzz, measure,
                             parse_trace, rows_to_json, summarize,
                             validate_structure, workload)


def test_oracle_multiset():
    o = OracleQueue()
    for seq, key in enumerate([5, 3, 3, 9]):
        o.insert(seq, key)
    assert o.min_key() == 3 and len(o) == 4
    o.remove(1)
    assert o.min_key() == 3
    o.decrease(3, 1)
    assert o.min_key() == 1
    assert o.sorted_keys() == [1, 3, 5]


def test_fresh_queue_is_healthy():
    assert validate_structure(PriorityQueue()) == []


def test_validator_catches_corrupted_rank():
    q = PriorityQueue()
    for k in range(64):
        q.insert(Node(k))
    victim = q.t1.last_child
    victim.rank += 3
    problems = validate_structure(q)
    assert any('F_' in p for p in problems)


def test_validator_catches_unrecorded_violation():
    q = PriorityQueue()
    nodes = [Node(k) for k in range(100)]
    for x in nodes:
        q.insert(x)
    deep = max((v for v in nodes if v.last_child is None and
                v.right is not None and v.right is not q.t1
                and v.right.last_child is not v), key=lambda v: v.element,
               default=None)
    assert deep is not None
    deep.element = -5
    assert any('not recorded' in p or 'minimum' in p
               for p in validate_structure(q))


def test_healthy_after_delete_min_on_fuzzed_queue():
    ok, msg, ex = fuzz(2, 3000, 3, validate_every=1)
    assert ok, msg
    for q in ex.queues.values():
        if len(q):
            q.delete_min()
            assert validate_structure(q) == []


def test_fuzz_seed_one():
    ok, msg, _ = fuzz(1, 10000, 3)
    assert ok, msg


def test_fuzz_without_meld_ends_with_one_tree():
    mix = {'insert': 40, 'deletemin': 20, 'decrease': 30, 'delete': 10}
    ok, msg, ex = fuzz(4, 5000, 3, op_mix=mix)
    assert ok, msg
    assert all(q.t2 is None for q in ex.queues.values())


def test_fuzz_respects_live_cap():
    ok, msg, ex = fuzz(6, 3000, 2, max_live=40)
    assert ok, msg
    assert all(len(q) <= 80 for q in ex.queues.values())


def test_fuzz_replay_is_exact():
    ops = []
    ok, msg, ex = fuzz(5, 4000, 4, trace=ops)
    assert ok
    text = [format_op(op) for op in ops]
    again = parse_trace(text)
    assert again == ops
    ex2 = Executor()
    for op in again:
        ex2.apply(op)
    assert ex2.drained == ex.drained
    assert ex2.cmp.count == ex.cmp.count


def test_parse_errors_carry_line_numbers():
    with pytest.raises(TraceError) as info:
        parse_trace(['new 0', 'insert 0 5', 'insert 0'])
    assert info.value.lineno == 3
    with pytest.raises(TraceError):
        parse_trace(['meld 0 1 2'])
    with pytest.raises(TraceError):
        parse_trace(['bogus 1'])


def test_parse_skips_comments_and_blanks():
    assert parse_trace(['# hello', '', 'new 3']) == [('new', 3)]


def test_trace_format_round_trip():
    op = ('meld', 1, 2, 3)
    assert format_op(op) == 'meld 1 2 -> 3'
    assert parse_trace([format_op(op)]) == [op]


def test_divergence_is_reported():
    ex = Executor()
    ex.apply(('new', 0))
    with pytest.raises(AssertionError):
        ex.apply(('decrease', 0, 7, 1))


@pytest.mark.parametrize('name', sorted(WORKLOADS))
def test_workloads_are_deterministic(name):
    a = workload(name, 64, seed=3)
    b = workload(name, 64, seed=3)
    c = workload(name, 64, seed=4)
    assert a == b
    if name not in ('sorted', 'reverse'):
        assert a != c
    ex = Executor(validate_every=16)
    for op in a:
        ex.apply(op)


def test_measurement_does_not_perturb():
    ops = workload('dijkstra-like', 300, seed=1)
    plain = Executor(check=False, validate_every=0)
    for op in ops:
        plain.apply(op)
    ex = Executor(check=False, validate_every=0, record=True)
    for op in ops:
        ex.apply(op)
    assert ex.drained == plain.drained and ex.cmp.count == plain.cmp.count


def test_measure_drain_within_bound():
    stats = measure(workload('drain', 2 ** 12, seed=0))
    dm = [s for s in stats if s.op == 'deletemin']
    assert len(dm) == 2 ** 12
    assert max(s.comparisons for s in dm) <= delete_min_bound(2 ** 12, 0.1, 64)


def test_insert_maxima_do_not_grow():
    maxima = set()
    for n in (2 ** 8, 2 ** 10, 2 ** 12):
        stats = measure(workload('random', n, seed=0))
        maxima.add(max(s.comparisons for s in stats if s.op == 'insert'))
    assert len(maxima) == 1


def test_summary_of_empty_trace():
    assert summarize(measure([])) == []


def test_summary_rows_and_json():
    rows = summarize(measure(workload('drain', 128, seed=0)))
    keys = {'op', 'n_bucket', 'max_comparisons', 'mean_comparisons',
            'max_fixes', 'max_edits'}
    assert rows and all(set(r) == keys for r in rows)
    data = json.loads(rows_to_json(rows, {'x': 1}))
    assert data['meta'] == {'x': 1} and data['rows'] == rows


def test_delete_min_bound_formula():
    assert delete_min_bound(2 ** 20, 0.1, 0) == pytest.approx(71.22 * 20)
    assert delete_min_bound(1, 0.1, 5) == pytest.approx(71.22 + 5)
