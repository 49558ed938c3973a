'''Verification and measurement tools.

* ``OracleQueue``: a plain multiset reference for differential testing.
* ``validate_structure``: full scan of a queue against every structural
  rule, returning a list of problems.
* ``Executor``: runs trace operations on live queues and oracles in
  lockstep; ``fuzz`` feeds it random operations and ``measure`` records
  per-operation costs.
* Workload generators producing traces for benchmarks.
'''

import heapq
import json
import math
import random
from collections import defaultdict

from . import core
from .core import Comparator, Node
from .instrument import TALLY
from .queue import (DEFAULT_EXTENSION, TRANSFER_STEPS, EmptyQueueError,
                    PriorityQueue, meld)

__all__ = ['OracleQueue', 'OpStats', 'TraceError', 'Divergence',
           'validate_structure', 'parse_trace', 'format_op', 'Executor',
           'fuzz', 'measure', 'summarize', 'WORKLOADS', 'workload',
           'iter_workload',
           'delete_min_bound', 'DEFAULT_MIX', 'EPSILON', 'DEFAULT_SLACK']


class TraceError(ValueError):
    '''Malformed trace line.'''

    def __init__(self, lineno, message):
        super().__init__('line %d: %s' % (lineno, message))
        self.lineno = lineno


class Divergence(AssertionError):
    '''The live queue disagreed with the oracle or broke a rule.'''


class OracleQueue:
    '''Multiset of (key, seq) pairs with lazy-deletion heap lookups.'''

    def __init__(self):
        self.keys = {}
        self._heap = []
        self._order = []
        self._where = {}

    def __len__(self):
        return len(self.keys)

    def insert(self, seq, key):
        self.keys[seq] = key
        heapq.heappush(self._heap, (key, seq))
        self._where[seq] = len(self._order)
        self._order.append(seq)

    def _clean(self):
        h = self._heap
        while h and self.keys.get(h[0][1]) != h[0][0]:
            heapq.heappop(h)

    def min_key(self):
        self._clean()
        return self._heap[0][0] if self._heap else None

    def remove(self, seq):
        key = self.keys.pop(seq)
        i = self._where.pop(seq)
        last = self._order.pop()
        if last != seq:
            self._order[i] = last
            self._where[last] = i
        return key

    def decrease(self, seq, key):
        assert key <= self.keys[seq]
        self.keys[seq] = key
        heapq.heappush(self._heap, (key, seq))

    def random_seq(self, rng):
        return self._order[rng.randrange(len(self._order))]

    def absorb(self, other):
        for seq, key in other.keys.items():
            self.insert(seq, key)
        other.keys.clear()

    def sorted_keys(self):
        return sorted(self.keys.values())


class OpStats:
    '''Costs of one operation.'''

    __slots__ = ('op', 'n', 'comparisons', 'fixes', 'edits', 'cases')

    def __init__(self, op, n, comparisons=0, fixes=0, edits=0, cases=None):
        self.op = op
        self.n = n
        self.comparisons = comparisons
        self.fixes = fixes
        self.edits = edits
        self.cases = cases or {}

    def as_dict(self):
        return {'op': self.op, 'n': self.n, 'comparisons': self.comparisons,
                'fixes': self.fixes, 'edits': self.edits,
                'cases': dict(self.cases)}


# Validation


def _rank_bound(n):
    return math.ceil(1.44 * math.log2(n)) if n > 1 else 1


def validate_structure(q):
    '''Return the list of broken rules of queue q (empty when healthy).'''
    problems = []
    if q.t1 is None:
        if q.size:
            problems.append('no root but size %d' % q.size)
        if q.t2 is not None:
            problems.append('t2 without t1')
        return problems
    roots = q.roots()
    if q.t2 is not None and not q.t1.rank < q.t2.rank:
        problems.append('rank(t1) %d not below rank(t2) %d' %
                        (q.t1.rank, q.t2.rank))
    sizes = {}
    order = []
    parent = {}
    for r in roots:
        if r.right is not None or r.left is not None:
            problems.append('root %r has siblings' % (r.element,))
        stack = [r]
        while stack:
            v = stack.pop()
            order.append(v)
            for c in core.children(v):
                parent[id(c)] = v
                stack.append(c)
    if len(order) != q.size:
        problems.append('reachable nodes %d != size %d' % (len(order), q.size))
    for v in reversed(order):
        sizes[id(v)] = 1 + sum(sizes[id(c)] for c in core.children(v))
    root_ids = {id(r) for r in roots}
    max_rank = 0
    for v in order:
        max_rank = max(max_rank, v.rank)
        p = parent.get(id(v))
        if id(v) in root_ids:
            kids = core.children(v)
            expected = kids[-1].rank + 1 if kids else 0
            if v.rank != expected:
                problems.append('root rank %d, expected %d' % (v.rank, expected))
            if sizes[id(v)] < core.fibonacci(v.rank):
                problems.append('root subtree smaller than F_%d' % v.rank)
        else:
            problems.extend(core.validate_node(
                v, root_child=id(p) in root_ids, sizes=sizes))
        if p is not None and v.element < p.element and v.vprev is None:
            problems.append('%r smaller than parent %r but not recorded' %
                            (v.element, p.element))
    # Root counters mirror the children.
    for r, rc in ((q.t1, q.c1), (q.t2, q.c2)):
        if r is None:
            continue
        if rc is None or rc.root is not r:
            problems.append('counter not bound to its root')
            continue
        c = rc.counter
        if not c.is_regular():
            problems.append('counter of root %r irregular: %r' %
                            (r.element, c.digits()))
        if not c.forward_ok():
            problems.append('counter of root %r has stale forward links' %
                            (r.element,))
        seq = core.rank_sequence(r)
        if seq != c.digits():
            problems.append('counter %r does not match children %r' %
                            (c.digits(), seq))
        for i in range(len(c)):
            for t in c.trees(i):
                if t.rank != i or parent.get(id(t)) is not r:
                    problems.append('slot %d holds a stray tree' % i)
            if len(c.trees(i)) != c.digit(i):
                problems.append('slot %d tree count mismatch' % i)
    # Minimum and violation rules.
    t1 = q.t1
    for v in order:
        if v.element < t1.element:
            problems.append('%r below the minimum at t1' % (v.element,))
            break
    for v in [q.t1, q.t2] + core.children(q.t1):
        if v is not None and v.vprev is not None:
            problems.append('%r recorded as violation but exempt' % (v.element,))
    reach = {id(v) for v in order}
    for ring in (q.vs.active, q.vs.inactive):
        for v in ring:
            if id(v) not in reach:
                problems.append('violation %r not in the queue' % (v.element,))
    problems.extend(q.vs.validate())
    # The runner-up must be findable from t1.
    if q.size >= 2:
        second = min(v.element for v in order if v is not t1)
        spots = core.children(t1) + list(q.vs.active) + list(q.vs.inactive)
        if q.t2 is not None:
            spots.append(q.t2)
        if not any(not (second < v.element) for v in spots):
            problems.append('second smallest %r not reachable from t1' %
                            (second,))
    # Rank and degree bounds.
    if max_rank > _rank_bound(q.size):
        problems.append('max rank %d exceeds ceil(1.44 lg %d)' %
                        (max_rank, q.size))
    for v in order:
        if len(core.children(v)) > max(2 * max_rank, 1):
            problems.append('%r has too many children' % (v.element,))
            break
    return problems


# Traces


_ARITY = {'new': 1, 'insert': 2, 'deletemin': 1, 'decrease': 3,
          'delete': 2, 'destroy': 1}


def parse_trace(lines):
    '''Parse trace lines into op tuples; raise TraceError on bad input.'''
    ops = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        parts = line.split()
        name = parts[0]
        try:
            if name == 'meld':
                if len(parts) != 5 or parts[3] != '->':
                    raise ValueError('expected: meld <qid> <qid> -> <qid>')
                ops.append(('meld', int(parts[1]), int(parts[2]), int(parts[4])))
                continue
            if name not in _ARITY:
                raise ValueError('unknown operation %r' % name)
            if len(parts) != _ARITY[name] + 1:
                raise ValueError('%s takes %d arguments' % (name, _ARITY[name]))
            ops.append((name,) + tuple(int(p) for p in parts[1:]))
        except ValueError as exc:
            raise TraceError(lineno, str(exc)) from None
    return ops


def format_op(op):
    if op[0] == 'meld':
        return 'meld %d %d -> %d' % op[1:]
    return ' '.join(str(p) for p in op)


class Executor:
    '''Apply trace operations to live queues and oracles in lockstep.'''

    def __init__(self, extension=DEFAULT_EXTENSION, check=True,
                 validate_every=64, paranoid=False, record=False):
        self.cmp = Comparator()
        self.extension = extension
        self.queues = {}
        self.oracles = {}
        self.nodes = {}
        self.next_seq = 0
        self.check = check
        self.validate_every = validate_every
        self.paranoid = paranoid
        self.count = 0
        self.record = record
        self.stats = []
        self.drained = []

    def _fail(self, msg):
        raise Divergence('op %d: %s' % (self.count, msg))

    def _queue(self, qid):
        if qid not in self.queues:
            self._fail('unknown queue %d' % qid)
        return self.queues[qid], self.oracles[qid]

    def apply(self, op):
        self.count += 1
        name = op[0]
        if self.record:
            size = self._size_for(op)
            c0 = self.cmp.count
            snap = TALLY.snapshot()
            cases0 = self._cases_for(op)
        touched = getattr(self, '_op_' + name)(*op[1:])
        if self.record:
            after = TALLY.snapshot()
            cases = {}
            if touched is not None:
                for k, v in touched.case_tally.items():
                    d = v - cases0.get(k, 0)
                    if d:
                        cases[k] = d
            self.stats.append(OpStats(
                name, size, self.cmp.count - c0, after[1] - snap[1],
                after[0] - snap[0], cases))
        if self.check and touched is not None:
            self._check(touched, op)
        return touched

    def _size_for(self, op):
        if op[0] == 'meld':
            return sum(len(self.queues[q]) for q in op[1:3] if q in self.queues)
        q = self.queues.get(op[1])
        return len(q) if q is not None else 0

    def _cases_for(self, op):
        if op[0] == 'meld':
            out = defaultdict(int)
            for q in op[1:3]:
                for k, v in self.queues[q].case_tally.items():
                    out[k] += v
            return out
        q = self.queues.get(op[1])
        return dict(q.case_tally) if q is not None else {}

    def _check(self, q, op):
        qid = op[3] if op[0] == 'meld' else op[1]
        oracle = self.oracles.get(qid)
        if oracle is None:
            return
        if len(q) != len(oracle):
            self._fail('size %d, oracle %d' % (len(q), len(oracle)))
        if len(oracle):
            if q.find_min().element != oracle.min_key():
                self._fail('min %r, oracle %r' % (q.find_min().element,
                                                  oracle.min_key()))
        if self.paranoid or (self.validate_every and
                             self.count % self.validate_every == 0):
            problems = validate_structure(q)
            if op[0] == 'deletemin' and len(q):
                counts = q.vs.counts()
                if counts and max(counts) > 2:
                    problems.append('more than two active violations of one '
                                    'rank after delete_min')
            if problems:
                self._fail('invariant broken after %s: %s' %
                           (format_op(op), '; '.join(problems[:5])))

    # Operations

    def _op_new(self, qid):
        if qid in self.queues:
            self._fail('queue %d exists' % qid)
        self.queues[qid] = PriorityQueue(self.cmp, self.extension)
        self.oracles[qid] = OracleQueue()
        return self.queues[qid]

    def _op_insert(self, qid, key):
        q, o = self._queue(qid)
        node = Node(key, seq=self.next_seq)
        self.nodes[self.next_seq] = node
        o.insert(self.next_seq, key)
        self.next_seq += 1
        q.insert(node)
        return q

    def _op_deletemin(self, qid):
        q, o = self._queue(qid)
        if not len(o):
            try:
                q.delete_min()
            except EmptyQueueError:
                return q
            self._fail('delete_min on empty queue did not raise')
        node = q.delete_min()
        if node.element != o.min_key():
            self._fail('delete_min gave %r, oracle %r' % (node.element,
                                                          o.min_key()))
        if node.seq not in o.keys:
            self._fail('delete_min returned a foreign node')
        o.remove(node.seq)
        if not node.detached():
            self._fail('returned node still linked')
        del self.nodes[node.seq]
        self.drained.append(node.element)
        return q

    def _node(self, seq, o):
        if seq not in self.nodes or seq not in o.keys:
            self._fail('node %d not in queue' % seq)
        return self.nodes[seq]

    def _op_decrease(self, qid, seq, key):
        q, o = self._queue(qid)
        node = self._node(seq, o)
        q.decrease(node, key)
        o.decrease(seq, key)
        return q

    def _op_delete(self, qid, seq):
        q, o = self._queue(qid)
        node = self._node(seq, o)
        q.delete(node)
        o.remove(seq)
        if not node.detached():
            self._fail('deleted node still linked')
        del self.nodes[seq]
        return q

    def _op_meld(self, a, b, c):
        qa, oa = self._queue(a)
        qb, ob = self._queue(b)
        if c in self.queues and c not in (a, b):
            self._fail('queue %d exists' % c)
        out = meld(qa, qb)
        oa.absorb(ob)
        del self.queues[a], self.oracles[a]
        if b in self.queues:
            del self.queues[b], self.oracles[b]
        self.queues[c] = out
        self.oracles[c] = oa
        return out

    def _op_destroy(self, qid):
        q, o = self._queue(qid)
        q.destroy()
        del self.queues[qid], self.oracles[qid]
        return None


# Fuzzing

DEFAULT_MIX = {'insert': 40, 'deletemin': 18, 'decrease': 25, 'delete': 7,
               'meld': 4, 'destroy': 1}


def _gen_op(rng, ex, mix, names, weights, n_queues, next_qid, max_live=None):
    '''Pick one random valid operation for the executor's current state.

    With ``max_live`` set, an insert into a queue already holding that
    many elements becomes a delete_min instead.'''
    live = sorted(ex.queues)
    while len(live) < n_queues:
        qid = next_qid[0]
        next_qid[0] += 1
        return ('new', qid)
    name = rng.choices(names, weights)[0]
    qid = rng.choice(live)
    o = ex.oracles[qid]
    if name == 'insert' and max_live is not None and len(o) >= max_live:
        return ('deletemin', qid)
    if name == 'insert' or (name in ('decrease', 'delete') and not len(o)):
        return ('insert', qid, rng.randint(-2 ** 20, 2 ** 20))
    if name == 'deletemin':
        return ('deletemin', qid)
    if name == 'decrease':
        seq = o.random_seq(rng)
        return ('decrease', qid, seq, o.keys[seq] - rng.randint(0, 2 ** 12))
    if name == 'delete':
        return ('delete', qid, o.random_seq(rng))
    if name == 'meld':
        if len(live) < 2:
            return ('deletemin', qid)
        a, b = rng.sample(live, 2)
        c = next_qid[0]
        next_qid[0] += 1
        return ('meld', a, b, c)
    if name == 'destroy':
        if len(o):
            return ('deletemin', qid)
        return ('destroy', qid)
    raise ValueError('unknown operation %r in mix' % name)


def fuzz(seed, n_ops, n_queues=4, op_mix=None, validate_every=64,
         paranoid=False, extension=DEFAULT_EXTENSION, trace=None,
         max_live=None):
    '''Run random operations against live queues and oracles.

    Returns ``(ok, message, ops)``; ``ops`` is the executed trace (only
    kept when ``trace`` is a list, which is then filled in place).
    '''
    rng = random.Random(seed)
    mix = op_mix or DEFAULT_MIX
    names = sorted(mix)
    weights = [mix[k] for k in names]
    ex = Executor(extension, True, validate_every, paranoid)
    next_qid = [0]
    ops = trace if trace is not None else None
    for _ in range(n_ops):
        op = _gen_op(rng, ex, mix, names, weights, n_queues, next_qid,
                     max_live)
        if ops is not None:
            ops.append(op)
        try:
            ex.apply(op)
        except Divergence as exc:
            return False, str(exc), ex
        except Exception as exc:  # crash inside the library
            return False, 'op %d: %s: %s' % (ex.count, type(exc).__name__,
                                               exc), ex
    for qid, q in ex.queues.items():
        problems = validate_structure(q)
        if problems:
            return False, 'final check of queue %d: %s' % (
                qid, '; '.join(problems[:5])), ex
    return True, 'pass', ex


# Workloads and measurement


def _wl_drain(n, rng, d):
    yield ('new', 0)
    for _ in range(n):
        yield ('insert', 0, rng.randint(-2 ** 40, 2 ** 40))
    for _ in range(n):
        yield ('deletemin', 0)


def _wl_sorted(n, rng, d):
    yield ('new', 0)
    for i in range(n):
        yield ('insert', 0, i)
    for _ in range(n):
        yield ('deletemin', 0)


def _wl_reverse(n, rng, d):
    yield ('new', 0)
    for i in range(n):
        yield ('insert', 0, n - i)
    for _ in range(n):
        yield ('deletemin', 0)


class _Keys:
    '''Track live node keys so generated decreases stay legal.'''

    def __init__(self):
        self.keys = {}
        self.order = []
        self.where = {}
        self.seq = 0

    def add(self, key):
        s = self.seq
        self.seq += 1
        self.keys[s] = key
        self.where[s] = len(self.order)
        self.order.append(s)
        return s

    def drop_min(self):
        s = min(self.keys, key=lambda k: (self.keys[k], k))
        self.drop(s)

    def drop(self, s):
        del self.keys[s]
        i = self.where.pop(s)
        last = self.order.pop()
        if last != s:
            self.order[i] = last
            self.where[last] = i

    def pick(self, rng):
        return self.order[rng.randrange(len(self.order))]


def _wl_random(n, rng, d):
    yield ('new', 0)
    live = 0
    for _ in range(n):
        yield ('insert', 0, rng.randint(-2 ** 40, 2 ** 40))
        live += 1
        if live and rng.random() < 0.3:
            yield ('deletemin', 0)
            live -= 1


def _wl_dijkstra(n, rng, d):
    yield ('new', 0)
    keys = {}
    order = []
    for s in range(n):
        k = rng.randint(0, 2 ** 40)
        keys[s] = k
        order.append(s)
        yield ('insert', 0, k)
    heap = [(k, s) for s, k in keys.items()]
    heapq.heapify(heap)
    alive = set(order)
    for _ in range(n):
        while heap and (heap[0][1] not in alive or keys[heap[0][1]] != heap[0][0]):
            heapq.heappop(heap)
        if not heap:
            break
        k, s = heapq.heappop(heap)
        alive.discard(s)
        yield ('deletemin', 0)
        for _ in range(d):
            if not alive:
                break
            t = order[rng.randrange(len(order))]
            if t not in alive:
                continue
            nk = max(k, keys[t] - rng.randint(0, 2 ** 30))
            keys[t] = nk
            heapq.heappush(heap, (nk, t))
            yield ('decrease', 0, t, nk)


def _wl_decrease_heavy(n, rng, d):
    yield ('new', 0)
    for s in range(n):
        yield ('insert', 0, rng.randint(0, 2 ** 40))
    # Every decrease goes below all earlier keys, so it is always legal.
    lo = -1
    for _ in range(2 * n):
        lo -= 1
        yield ('decrease', 0, rng.randrange(n), lo)
    for _ in range(min(n, 64)):
        yield ('deletemin', 0)


def _wl_meld_heavy(n, rng, d):
    # Build many small queues and meld them pairwise, then keep inserting,
    # decreasing and melding small queues into the big one.
    size = 16
    qid = 0
    pending = []
    seq = 0
    for _ in range(max(n // size, 1)):
        yield ('new', qid)
        for _ in range(size):
            yield ('insert', qid, rng.randint(0, 2 ** 40))
            seq += 1
        pending.append(qid)
        qid += 1
        while len(pending) >= 2 and rng.random() < 0.5:
            a = pending.pop(rng.randrange(len(pending)))
            b = pending.pop(rng.randrange(len(pending)))
            yield ('meld', a, b, qid)
            pending.append(qid)
            qid += 1
    while len(pending) >= 2:
        a = pending.pop()
        b = pending.pop()
        yield ('meld', a, b, qid)
        pending.append(qid)
        qid += 1
    big = pending[0]
    lo = -1
    for _ in range(n // 4):
        yield ('new', qid)
        for _ in range(4):
            yield ('insert', qid, rng.randint(0, 2 ** 40))
        yield ('meld', big, qid, qid + 1)
        big = qid + 1
        qid += 2
        lo -= rng.randint(1, 2 ** 10)
        yield ('decrease', big, rng.randrange(seq), lo)


WORKLOADS = {
    'drain': _wl_drain,
    'sorted': _wl_sorted,
    'reverse': _wl_reverse,
    'random': _wl_random,
    'dijkstra-like': _wl_dijkstra,
    'meld-heavy': _wl_meld_heavy,
    'decrease-heavy': _wl_decrease_heavy,
}


def iter_workload(name, n, seed=0, d=4):
    '''Deterministic stream of op tuples for a named workload.'''
    if name not in WORKLOADS:
        raise ValueError('unknown workload %r' % name)
    rng = random.Random('%s/%d/%d' % (name, n, seed))
    return WORKLOADS[name](n, rng, d)


def workload(name, n, seed=0, d=4):
    '''Deterministic trace (list of op tuples) for a named workload.'''
    return list(iter_workload(name, n, seed, d))


def measure(ops, extension=DEFAULT_EXTENSION, check=False):
    '''Run a trace and return the per-operation OpStats list.'''
    ex = Executor(extension, check=check, validate_every=0, record=True)
    for op in ops:
        ex.apply(op)
    return ex.stats


def n_bucket(n):
    return int(math.log2(n)) if n >= 1 else 0


def summarize(stats, by_bucket=True):
    '''Rows ``{op, n_bucket, max_comparisons, mean_comparisons, max_fixes,
    max_edits}`` sorted by operation and bucket.'''
    groups = defaultdict(list)
    for s in stats:
        key = (s.op, n_bucket(s.n) if by_bucket else None)
        groups[key].append(s)
    rows = []
    for (op, b), items in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1] or 0)):
        rows.append({
            'op': op,
            'n_bucket': b,
            'max_comparisons': max(s.comparisons for s in items),
            'mean_comparisons': round(sum(s.comparisons for s in items) /
                                      len(items), 3),
            'max_fixes': max(s.fixes for s in items),
            'max_edits': max(s.edits for s in items),
        })
    return rows


EPSILON = 0.1
DEFAULT_SLACK = 64.0


def delete_min_bound(n, epsilon, slack):
    '''Comparison budget of one delete_min at size n.'''
    return (69.12 + 21 * epsilon) * math.log2(max(n, 2)) + slack


def rows_to_json(rows, meta=None):
    return json.dumps({'meta': meta or {}, 'rows': rows}, indent=2)


def config_meta(extension):
    return {'extension': extension, 'transfer_steps': TRANSFER_STEPS}
