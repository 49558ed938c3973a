'''Violation bookkeeping and violation reductions.

A *violation* is a node that may hold a smaller element than its parent.
Every violation sits in exactly one ring: the active ring or the inactive
ring of the queue (both guarded by t1), or the guarded ring of some other
node.  Active violations are also counted per rank in a resizable array,
with the violations of one rank kept next to each other in the active
ring.  Ranks holding at least three active violations are chained in the
*reducible* list; each reduction picks three violations of such a rank and
removes at least one violation net.
'''

from . import core
from .core import (Ring, case1_eligible, detach_subtree, is_last_child,
                   is_singleton, join, replace, unlink)
from .rarray import ResizableArray

__all__ = ['ViolationStructure', 'reduce', 'CASE_NAMES']

CASE_NAMES = ('1', '1-lift', '2', '3', '4', '5', 'leaves', 'pair', 'nested')


class _Entry:
    '''Array entry for one rank: first active violation and count.'''

    __slots__ = ('rank', 'first', 'count', 'rprev', 'rnext')

    def __init__(self, rank):
        self.rank = rank
        self.first = None
        self.count = 0
        self.rprev = None
        self.rnext = None


class ViolationStructure:
    '''Active and inactive violations of a queue's t1.'''

    def __init__(self):
        self.array = ResizableArray()
        self.active = Ring()
        self.inactive = Ring()
        self.reducible = None
        self.n_active = 0
        self.n_inactive = 0

    def __len__(self):
        return len(self.array)

    def is_active(self, x):
        return x.vprev is not None and x.vring is self.active

    def is_inactive(self, x):
        return x.vprev is not None and x.vring is self.inactive

    # Reducible list

    def _push_reducible(self, e):
        e.rprev = None
        e.rnext = self.reducible
        if self.reducible is not None:
            self.reducible.rprev = e
        self.reducible = e

    def _drop_reducible(self, e):
        if e.rprev is not None:
            e.rprev.rnext = e.rnext
        else:
            self.reducible = e.rnext
        if e.rnext is not None:
            e.rnext.rprev = e.rprev
        e.rprev = e.rnext = None

    # Recording

    def record(self, x):
        '''Record x as a violation guarded by t1.'''
        assert x.vprev is None
        r = x.rank
        if r < len(self.array):
            e = self.array[r]
            if e.first is None:
                self.active.push(x)
                e.first = x
            else:
                f = e.first
                nxt = f.vnext
                x.vprev = f
                x.vnext = nxt
                f.vnext = x
                nxt.vprev = x
                x.vring = self.active
            e.count += 1
            if e.count == 3:
                self._push_reducible(e)
            self.n_active += 1
        else:
            self.inactive.push(x)
            self.n_inactive += 1

    def remove(self, x):
        '''Take x out of whatever violation ring it is in.'''
        assert x.vprev is not None
        if x.vring is self.active:
            e = self.array[x.rank]
            assert e.count >= 1
            if e.first is x:
                e.first = x.vnext if e.count > 1 else None
            e.count -= 1
            if e.count == 2:
                self._drop_reducible(e)
            self.n_active -= 1
        elif x.vring is self.inactive:
            self.n_inactive -= 1
        p, n = x.vprev, x.vnext
        p.vnext = n
        n.vprev = p
        x.vprev = x.vnext = x.vring = None

    def retarget(self, old, new):
        '''Point an entry that referenced ``old`` at ``new`` (after a swap).'''
        if new.vring is self.active and new.rank < len(self.array):
            e = self.array[new.rank]
            if e.first is old:
                e.first = new

    # Array size

    def extend(self, k, max_rank):
        '''Grow the array by up to k entries, never beyond max_rank + 1.'''
        grown = 0
        while grown < k and len(self.array) < max_rank + 1:
            self.array.grow(_Entry(len(self.array)))
            grown += 1
        return grown

    def contract(self, size):
        '''Drop empty trailing entries down to ``size``.'''
        while len(self.array) > size:
            e = self.array[len(self.array) - 1]
            if e.count:
                break
            self.array.shrink()

    def activate_inactive(self):
        '''Move every inactive violation into the array.'''
        for x in list(self.inactive):
            assert x.rank < len(self.array)
            self.remove(x)
            self.record(x)

    def reduction_possible(self):
        return self.reducible is not None

    def pick_triple(self):
        '''First three violations of the first reducible rank.'''
        e = self.reducible
        x1 = e.first
        x2 = x1.vnext
        x3 = x2.vnext
        assert x1.rank == x2.rank == x3.rank == e.rank
        return x1, x2, x3

    def counts(self):
        return [self.array[i].count for i in range(len(self.array))]

    def allocated(self):
        return self.array.allocated

    def validate(self):
        '''Return a list of bookkeeping problems.'''
        problems = []
        seen = {}
        prev_rank = None
        runs = set()
        for x in self.active:
            if x.vring is not self.active:
                problems.append('active node %r has a stale ring tag' % (x,))
            seen[x.rank] = seen.get(x.rank, 0) + 1
            if x.rank != prev_rank:
                if x.rank in runs:
                    problems.append('active rank %d not consecutive' % x.rank)
                runs.add(x.rank)
                if x.rank < len(self.array) and self.array[x.rank].first is not x:
                    problems.append('entry %d does not point at its run' % x.rank)
                prev_rank = x.rank
        red = set()
        e = self.reducible
        while e is not None:
            red.add(e.rank)
            e = e.rnext
        for i in range(len(self.array)):
            e = self.array[i]
            if e.count != seen.get(i, 0):
                problems.append('rank %d count %d but %d listed' %
                                (i, e.count, seen.get(i, 0)))
            if (e.count >= 3) != (i in red):
                problems.append('reducible list wrong at rank %d' % i)
        if any(r >= len(self.array) for r in seen):
            problems.append('active violation beyond the array')
        if sum(seen.values()) != self.n_active:
            problems.append('active total mismatch')
        if len(self.inactive) != self.n_inactive:
            problems.append('inactive total mismatch')
        return problems


# Reductions


def _context(x):
    '''(x, s, p): x's sibling among its parent's last two children, and
    the parent.  A leaf that is the only child of its parent has no such
    sibling and gets s = None.'''
    p = x.right
    if p.last_child is x:
        return x, x.left, p
    s = p
    assert is_last_child(s), 'violation is neither last nor second-last'
    return x, s, s.right


def _settle(p, candidates, out):
    '''Detach candidate children of p that were left as single-member
    groups, and then singletons at the end of p.  p is free to change
    rank.'''
    for c in candidates:
        if (c is not None and c.right is not None and not is_last_child(c)
                and is_singleton(c)):
            unlink(c)
            out.append(c)
    while p.last_child is not None and is_singleton(p.last_child):
        c = p.last_child
        unlink(c)
        out.append(c)
    p.rank = p.last_child.rank + 1 if p.last_child is not None else 0


def _settle_fixed(p, candidates, out):
    '''Like _settle for a parent that keeps its place: only non-last
    members may go, and the rank must not change.'''
    rank = p.rank
    for c in candidates:
        if (c is not None and c.right is not None and not is_last_child(c)
                and is_singleton(c)):
            unlink(c)
            out.append(c)
    assert p.last_child.rank + 1 == rank
    assert not is_singleton(p.last_child)


def _forget(vs, x):
    '''Stop tracking x as a violation (before its rank changes).'''
    if x.vprev is not None:
        vs.remove(x)
        return True
    return False


def _join_tracked(q, a, b):
    '''Join two detached trees; the loser is ordered under the winner and
    loses any violation record, the winner keeps its record.'''
    vs = q.vs
    wa = _forget(vs, a)
    wb = _forget(vs, b)
    w = join(a, b, q.cmp)
    if (w is a and wa) or (w is b and wb):
        vs.record(w)
    return w


def _put_in_hole(q, old, new, mark):
    '''Let detached ``new`` take the place of ``old``; mark it violating
    when asked to.'''
    replace(old, new)
    if mark and new.vprev is None:
        q.vs.record(new)


def _finish(q, out):
    # Largest first: the counter only accepts ranks up to its length.
    out.sort(key=lambda t: -t.rank)
    for t in out:
        q.c1.add(t)


def _take_replacement(q, k, xs, involved):
    '''Remove a rank-k tree from below t1 for a reduction.

    Returns the tree, or None if the removal moved one of the involved
    nodes below t1.  In that case a simpler reduction has been carried
    out instead and the removed tree is back below t1.
    '''
    t = q.c1.remove(k)
    if not any(n is t or q.c1.holds(n) for n in involved if n is not None):
        return t
    for x in xs:
        if x.vprev is None:
            # x itself ended up as a child of t1.
            q.c1.add(t)
            q.stats_case('1')
            return None
    for x in xs:
        _, s, p = _context(x)
        if p is t:
            _lift(q, x, s, p, free=True)
            return None
        if q.c1.holds(p):
            _lift(q, x, s, p, extra=[t])
            return None
    raise AssertionError('replacement removal disturbed the reduction')


def _lift(q, x, s, p, free=False, extra=()):
    '''x's parent p is a child of t1 (or already removed from below t1):
    take p out, cut x off and put all pieces back below t1.'''
    if not free:
        q.c1.remove(p.rank, p)
    out = [x]
    left = x.left
    unlink(x)
    _settle(p, [left], out)
    out.append(p)
    out.extend(extra)
    _finish(q, out)
    q.stats_case('1-lift')


def _case_move(q, a, b, T):
    '''Cases 2 and 3(a): value(p_a) <= value(p_b).  x_a and x_b go below
    t1, s_b moves below p_a, p_b is dismantled and T takes its place.'''
    xa, sa, pa = a
    xb, sb, pb = b
    out = [xa, xb]
    cands = [xa.left]
    unlink(xa)
    unlink(xb)
    assert pa.last_child is sa
    if sb is not None:
        unlink(sb)
        if sa is None:
            core.append_child(pa, sb)
        elif sb.rank >= sa.rank:
            core.insert_after(sb, sa)
        else:
            core.insert_before(sb, sa)
        cands.append(sb.left)
    _settle_fixed(pa, cands, out)
    _forget(q.vs, pb)
    _put_in_hole(q, pb, T, True)
    _settle(pb, [], out)
    out.append(pb)
    _finish(q, out)


def _case_swap(q, a, b, T):
    '''Case 3(b) (also 5(b), 5(c)): value(p_b) < value(p_a).  s_a takes
    the place of p_b, both parents are dismantled, T takes p_a's place.'''
    xa, sa, pa = a
    xb, sb, pb = b
    out = [xa, xb]
    unlink(xa)
    unlink(xb)
    was_violating = _forget(q.vs, pb)
    assert pa.last_child is sa
    unlink(sa)
    _put_in_hole(q, pb, sa, was_violating)
    _settle(pb, [], out)
    out.append(pb)
    _forget(q.vs, pa)
    _put_in_hole(q, pa, T, True)
    _settle(pa, [], out)
    out.append(pa)
    _finish(q, out)


def _case_join(q, a, b, c, T):
    '''Cases 4 and 5(a): value(p_a) is smallest.  s_b and s_c are joined
    and replace x_a; x_b and x_c are joined and replace p_b; T replaces
    p_c.'''
    xa, sa, pa = a
    xb, sb, pb = b
    xc, sc, pc = c
    out = []
    for v in (xb, sb, xc, sc):
        unlink(v)
    j = _join_tracked(q, sb, sc)
    replace(xa, j)
    out.append(xa)
    k = _join_tracked(q, xb, xc)
    assert k.vprev is not None
    _forget(q.vs, pb)
    replace(pb, k)
    _settle(pb, [], out)
    out.append(pb)
    _forget(q.vs, pc)
    _put_in_hole(q, pc, T, True)
    _settle(pc, [], out)
    out.append(pc)
    _finish(q, out)


def _case_leaves(q, a, b, T):
    '''Two leaf violations, each the only child of its parent, with
    value(p_a) <= value(p_b).  Both leaves go below t1, the emptied p_b
    takes x_a's place below p_a, and T takes p_b's place.'''
    xa, _, pa = a
    xb, _, pb = b
    _forget(q.vs, pb)
    unlink(xb)
    pb.rank = 0
    _put_in_hole(q, pb, T, True)
    replace(xa, pb)
    _finish(q, [xa, xb])


def _dismantle_pair(q, xi, xj, p, T):
    '''Two of the violations are the last two children of the same p.'''
    out = [xi, xj]
    unlink(xi)
    unlink(xj)
    _forget(q.vs, p)
    _put_in_hole(q, p, T, True)
    _settle(p, [], out)
    out.append(p)
    _finish(q, out)


def _dismantle_nested(q, inner, outer, T):
    '''The parent of one violation is the sibling of another: the outer
    parent is replaced by T, and both violations are cut from the freed
    subtree.'''
    xi, si, pi = inner
    xo, so, po = outer
    assert so is pi
    out = [xo, xi]
    unlink(xo)
    _forget(q.vs, pi)
    unlink(pi)
    cand = xi.left
    unlink(xi)
    _settle(pi, [cand], out)
    out.append(pi)
    _forget(q.vs, po)
    _put_in_hole(q, po, T, True)
    _settle(po, [], out)
    out.append(po)
    _finish(q, out)


def reduce(q):
    '''Perform one violation reduction on queue q.

    Requires a rank with three active violations and no second tree.
    Returns the name of the case that was applied.
    '''
    vs = q.vs
    assert q.t2 is None, 'reductions run only without a second tree'
    assert vs.reduction_possible()
    xs = vs.pick_triple()
    r = xs[0].rank

    for x in xs:
        if case1_eligible(x):
            pieces = detach_subtree(x)
            _finish(q, pieces)
            return q.stats_case('1')

    trip = [_context(x) for x in xs]
    for x, s, p in trip:
        if q.c1.holds(p):
            _lift(q, x, s, p)
            return '1-lift'

    # Overlapping configurations.
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            xi, si, pi = trip[i]
            xj, sj, pj = trip[j]
            if i < j and pi is pj:
                involved = [xi, xj, pi]
                T = _take_replacement(q, pi.rank, xs, involved)
                if T is None:
                    return 'retry'
                _dismantle_pair(q, xi, xj, pi, T)
                return q.stats_case('pair')
            if pi is sj:
                involved = [xi, si, pi, xj, pj]
                T = _take_replacement(q, pj.rank, xs, involved)
                if T is None:
                    return 'retry'
                _dismantle_nested(q, trip[i], trip[j], T)
                return q.stats_case('nested')

    def srank(t):
        return t[1].rank if t[1] is not None else r - 1

    trip.sort(key=lambda t: -srank(t))
    ranks = tuple(srank(t) - r for t in trip)
    involved = [v for t in trip for v in t if v is not None]
    le = q.cmp.le
    a, b, c = trip

    if ranks[:2] in ((1, 1), (0, 0), (0, -1)) or ranks[:2] == (1, 0):
        case = '2' if ranks[:2] != (1, 0) else '3'
        if le(a[2], b[2]):
            first, second = a, b
        elif case == '2':
            first, second = b, a
        else:
            T = _take_replacement(q, a[2].rank, xs, involved)
            if T is None:
                return 'retry'
            _case_swap(q, a, b, T)
            return q.stats_case('3')
        T = _take_replacement(q, second[2].rank, xs, involved)
        if T is None:
            return 'retry'
        _case_move(q, first, second, T)
        return q.stats_case(case)

    if r == 0:
        # Leaves without siblings: pair up the last two.
        assert ranks[1:] == (-1, -1), ranks
        first, second = (b, c) if le(b[2], c[2]) else (c, b)
        T = _take_replacement(q, second[2].rank, xs, involved)
        if T is None:
            return 'retry'
        _case_leaves(q, first, second, T)
        return q.stats_case('leaves')

    if ranks == (-1, -1, -1):
        smallest = a if le(a[2], b[2]) else b
        if not le(smallest[2], c[2]):
            smallest = c
        others = [t for t in trip if t is not smallest]
        T = _take_replacement(q, others[1][2].rank, xs, involved)
        if T is None:
            return 'retry'
        _case_join(q, smallest, others[0], others[1], T)
        return q.stats_case('4')

    if ranks == (1, -1, -1):
        if le(a[2], b[2]) and le(a[2], c[2]):
            T = _take_replacement(q, c[2].rank, xs, involved)
            if T is None:
                return 'retry'
            _case_join(q, a, b, c, T)
            return q.stats_case('5')
        other = b if q.cmp.lt(b[2], a[2]) else c
        T = _take_replacement(q, a[2].rank, xs, involved)
        if T is None:
            return 'retry'
        _case_swap(q, a, other, T)
        return q.stats_case('5')

    raise AssertionError('uncovered sibling-rank pattern %r' % (ranks,))
