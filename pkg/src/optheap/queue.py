'''The meldable priority queue.

A queue is a pair of multi-way trees.  The root t1 of the first tree holds
the minimum; the optional second root t2 has a larger rank than t1 and is
merged into the first tree a few subtrees at a time.  The children of each
root are governed by an extended regular counter, so adding or removing a
child of a root costs a constant number of joins and splits.  Nodes that
may be smaller than their parents are recorded as violations (see
``violations``).  Dismissed arrays and counters are released gradually from
a pile.
'''

from collections import deque

from . import core
from .core import (Comparator, Ring, append_child, insert_after,
                   insert_before, join, node_swap, split, unlink)
from .counter import ExtendedRegularCounter, FixCallbacks
from .violations import ViolationStructure, reduce

__all__ = ['PriorityQueue', 'RootCounter', 'ReclamationPile', 'meld',
           'EmptyQueueError', 'NotEmptyError', 'AliasingError',
           'DismissedQueueError', 'DEFAULT_EXTENSION', 'TRANSFER_STEPS']

DEFAULT_EXTENSION = 4
TRANSFER_STEPS = 2
PILE_BUDGET = 8


class EmptyQueueError(LookupError):
    '''find_min or delete_min on an empty queue.'''


class NotEmptyError(RuntimeError):
    '''destroy on a queue that still holds elements.'''


class AliasingError(ValueError):
    '''meld of a queue with itself.'''


class DismissedQueueError(RuntimeError):
    '''Use of a queue that was consumed by meld.'''


class RootCounter(FixCallbacks):
    '''Counter over the children of one root, bound to its queue.'''

    def __init__(self, queue, root, first):
        self.queue = queue
        self.root = root
        self.first = first
        self.counter = ExtendedRegularCounter(self)

    # FixCallbacks

    def on_join(self, a, b):
        if self.first:
            return join(a, b, self.queue.cmp)
        return self.queue._join_tracked(a, b)

    def on_split(self, tree):
        if self.first:
            return split(tree)
        q = self.queue
        was_violating = tree.vprev is not None
        if was_violating:
            q.vs.remove(tree)
        top, extra, rest = split(tree)
        if was_violating:
            q.vs.record(rest)
            for piece in (top, extra):
                if piece is not None and piece.vprev is None:
                    q.vs.record(piece)
                    q.debt += 1
        return top, extra, rest

    def on_attach(self, tree, pos):
        root = self.root
        slots = self.counter.slots
        mates = [t for t in slots[pos].trees if t is not tree]
        if mates:
            insert_after(tree, mates[0])
        else:
            above = None
            for k in range(pos + 1, len(slots)):
                if slots[k].trees:
                    above = slots[k].trees[0]
                    while above.left is not None and above.left.rank == k:
                        above = above.left
                    break
            if above is not None:
                insert_before(tree, above)
            else:
                append_child(root, tree)
        root.rank = root.last_child.rank + 1
        if self.first and tree.vprev is not None:
            self.queue.vs.remove(tree)

    def on_detach(self, tree, pos):
        unlink(tree)
        root = self.root
        root.rank = root.last_child.rank + 1 if root.last_child is not None else 0

    # Queue-facing helpers

    def add(self, tree):
        self.counter.increment(tree.rank, tree)

    def remove(self, rank, tree=None):
        return self.counter.decrement(rank, tree)

    def holds(self, node):
        return self.counter.contains(node, node.rank)

    def allocated(self):
        return self.counter.allocated()

    def top_is_lonely(self):
        '''True when the highest rank has one child and no neighbour rank
        below it, which is not allowed for a non-root.'''
        c = self.counter
        n = len(c)
        return n >= 2 and c.digit(n - 1) == 1 and c.digit(n - 2) == 0

    def retarget(self, a, b):
        '''Exchange references to a and b after the two swapped places.'''
        if self.root is a:
            self.root = b
        elif self.root is b:
            self.root = a
        for r in {a.rank, b.rank}:
            trees = self.counter.trees(r)
            for i, t in enumerate(trees):
                if t is a:
                    trees[i] = b
                elif t is b:
                    trees[i] = a


class ReclamationPile:
    '''Dismissed structures waiting to be released a few units at a time.'''

    def __init__(self, budget=PILE_BUDGET):
        self.items = deque()
        self.budget = budget
        self.units = 0

    def add(self, obj, units):
        units = max(int(units), 1)
        self.items.append([obj, units])
        self.units += units

    def step(self):
        '''Release up to ``budget`` units.'''
        left = self.budget
        while left and self.items:
            item = self.items[0]
            k = min(left, item[1])
            item[1] -= k
            self.units -= k
            left -= k
            if item[1] == 0:
                self.items.popleft()

    def absorb(self, other):
        self.items.extend(other.items)
        self.units += other.units
        other.items = deque()
        other.units = 0

    def __len__(self):
        return len(self.items)


class PriorityQueue:
    '''Meldable min-priority queue over caller-owned ``Node`` objects.

    ``extension`` is the number of violation-array entries added per
    insert, decrease and meld while the array is shorter than needed.
    '''

    def __init__(self, cmp=None, extension=DEFAULT_EXTENSION):
        self.cmp = cmp if cmp is not None else Comparator()
        self.extension = extension
        self.t1 = None
        self.t2 = None
        self.c1 = None
        self.c2 = None
        self.vs = ViolationStructure()
        self.pile = ReclamationPile()
        self.size = 0
        self.debt = 0
        self.dismissed = False
        self.case_tally = {}

    def __len__(self):
        return self.size

    def __bool__(self):
        return self.size > 0

    def stats_case(self, name):
        self.case_tally[name] = self.case_tally.get(name, 0) + 1
        return name

    def _live(self):
        if self.dismissed:
            raise DismissedQueueError('queue was consumed by meld')

    # Internal structure helpers

    def _join_tracked(self, a, b):
        '''Join below t2: the loser stops being recorded, a recorded winner
        is recorded again at its new rank.'''
        vs = self.vs
        wa = a.vprev is not None
        wb = b.vprev is not None
        if wa:
            vs.remove(a)
        if wb:
            vs.remove(b)
        w = join(a, b, self.cmp)
        if (w is a and wa) or (w is b and wb):
            vs.record(w)
        return w

    def _swap(self, a, b):
        '''Exchange the positions of a and b and fix every outside
        reference to either of them.'''
        vs = self.vs
        entries = {}
        for v in (a, b):
            if vs.is_active(v) and v.rank < len(vs.array):
                e = vs.array[v.rank]
                entries[id(e)] = e
        node_swap(a, b)
        for e in entries.values():
            if e.first is a:
                e.first = b
            elif e.first is b:
                e.first = a
        for rc in (self.c1, self.c2):
            if rc is not None:
                rc.retarget(a, b)
        if self.t1 is a:
            self.t1 = b
        elif self.t1 is b:
            self.t1 = a
        if self.t2 is a:
            self.t2 = b
        elif self.t2 is b:
            self.t2 = a

    def _demote(self, rc, target, mark):
        '''Add root ``rc.root`` (with its counter rc) below another root.

        A root whose top rank would form a group of one is first relieved
        of its last child.  With ``mark`` the added trees are recorded as
        violations.  Returns the number of newly recorded violations.
        '''
        r = rc.root
        fresh = 0
        while rc.top_is_lonely():
            c = rc.remove(r.rank - 1)
            if mark and c.vprev is None:
                self.vs.record(c)
                fresh += 1
            target.add(c)
        self.pile.add(rc.counter.slots, rc.allocated())
        rc.queue = None
        if mark and r.vprev is None:
            self.vs.record(r)
            fresh += 1
        target.add(r)
        return fresh

    def _check_t2(self):
        '''Merge T2 below t1 once t1 has caught up in rank.'''
        if self.t2 is not None and self.t2.rank <= self.t1.rank:
            t2, rc = self.t2, self.c2
            self.t2 = None
            self.c2 = None
            self._demote(rc, self.c1, False)
            assert t2.right is not None

    def transfer_step(self):
        '''Move one subtree of rank rank(t1) from below t2 to below t1.'''
        if self.t2 is None:
            return
        k = self.t1.rank
        t = self.c2.remove(k)
        self.c1.add(t)
        self._check_t2()

    def reclaim_step(self):
        self.pile.step()

    def _extend(self):
        self.vs.extend(self.extension, self.t1.rank if self.t1 else 0)

    def _pay(self, limit):
        '''Perform up to ``limit`` reductions toward the violation debt.'''
        done = 0
        while self.debt > 0 and done < limit:
            if self.t2 is not None:
                break
            if not self.vs.reduction_possible():
                self.debt = 0
                break
            reduce(self)
            self.debt -= 1
            done += 1
        return done

    def _is_exempt(self, y):
        '''t1, t2 and the children of t1 are never recorded as violations.'''
        return y is self.t1 or y is self.t2 or self.c1.holds(y)

    # Public operations

    def find_min(self):
        self._live()
        if self.t1 is None:
            raise EmptyQueueError('find_min on an empty queue')
        return self.t1

    def insert(self, x):
        '''Insert detached node x.'''
        self._live()
        assert x.detached(), 'inserted node must be detached'
        self.size += 1
        if self.t1 is None:
            self.t1 = x
            self.c1 = RootCounter(self, x, True)
        else:
            old = self.t1
            if self.cmp.lt(x, old):
                self._swap(x, old)
                x = old
            self.c1.add(x)
            self._check_t2()
        self._extend()
        self.reclaim_step()
        return x

    def decrease(self, x, value):
        '''Replace the element of x by a value not greater than it.'''
        self._live()
        if x.element < value:
            raise ValueError('decrease to a larger value')
        x.element = value
        y = x
        if x is not self.t1 and self.cmp.lt(x, self.t1):
            old = self.t1
            self._swap(x, old)
            y = old
        if not self._is_exempt(y):
            if y.vprev is not None:
                self.vs.remove(y)
            self.vs.record(y)
            self.debt += 1
        for _ in range(TRANSFER_STEPS):
            self.transfer_step()
        self._pay(1)
        self._extend()
        self.reclaim_step()

    def delete_min(self):
        '''Remove the minimum and return its node, fully detached.'''
        self._live()
        if self.t1 is None:
            raise EmptyQueueError('delete_min on an empty queue')
        return self._remove_root()

    def delete(self, x):
        '''Remove node x from the queue and return it.'''
        self._live()
        if self.t1 is None:
            raise EmptyQueueError('delete on an empty queue')
        if x is not self.t1:
            old = self.t1
            self._swap(x, old)
            if not self._is_exempt(old):
                if old.vprev is not None:
                    self.vs.remove(old)
                self.vs.record(old)
        return self._remove_root()

    def _remove_root(self):
        vs = self.vs
        while self.t2 is not None:
            self.transfer_step()
        root = self.t1
        self.size -= 1
        cands = core.children(root)
        cands.extend(vs.active)
        cands.extend(vs.inactive)
        if not cands:
            assert self.size == 0
            self.pile.add(self.c1.counter.slots, self.c1.allocated())
            self.t1 = None
            self.c1 = None
            self.debt = 0
            self.reclaim_step()
            return root
        x = cands[0]
        lt = self.cmp.lt
        for c in cands[1:]:
            if lt(c, x):
                x = c
        c1 = self.c1
        if x.vprev is not None and (x.vring is vs.active or x.vring is vs.inactive):
            vs.remove(x)
            t = c1.remove(x.rank)
            if t is not x:
                if c1.holds(x):
                    c1.add(t)
                    c1.remove(x.rank, x)
                else:
                    core.replace(x, t)
                    vs.record(t)
        else:
            c1.remove(x.rank, x)
        kids = core.children(x)
        for c in reversed(kids):
            unlink(c)
            c1.add(c)
        x.rank = 0
        ring = x.vlist
        x.vlist = None
        self._swap(x, root)
        assert root.right is None and root.last_child is None
        root.rank = 0
        root.vlist = None
        t1 = self.t1
        vs.extend(t1.rank + 1 - len(vs), t1.rank)
        if ring is not None:
            for v in list(ring):
                vs.remove(v)
                if not self._is_exempt(v):
                    vs.record(v)
        vs.activate_inactive()
        while vs.reduction_possible():
            reduce(self)
        self.debt = 0
        vs.contract(t1.rank + 1)
        self.reclaim_step()
        assert root.detached()
        return root

    def destroy(self):
        self._live()
        if self.size:
            raise NotEmptyError('destroy on a queue with %d elements' % self.size)
        self.pile = ReclamationPile()
        self.vs = ViolationStructure()
        self.dismissed = True

    def space(self):
        '''Auxiliary slots held: violation array, counters and the pile.'''
        total = self.vs.allocated() + self.pile.units
        for rc in (self.c1, self.c2):
            if rc is not None:
                total += rc.allocated()
        return total

    def roots(self):
        return [t for t in (self.t1, self.t2) if t is not None]


def _adopt(dst, src):
    '''Move all of src's contents into the fresh queue dst.'''
    dst.t1, dst.t2 = src.t1, src.t2
    dst.c1, dst.c2 = src.c1, src.c2
    dst.vs = src.vs
    dst.size = src.size
    dst.debt = src.debt
    dst.pile.absorb(src.pile)
    for name, k in src.case_tally.items():
        dst.case_tally[name] = dst.case_tally.get(name, 0) + k
    for rc in (dst.c1, dst.c2):
        if rc is not None:
            rc.queue = dst
    src.dismissed = True


def meld(q1, q2):
    '''Meld two queues into a new one; both arguments are dismissed.'''
    if q1 is q2:
        raise AliasingError('meld of a queue with itself')
    q1._live()
    q2._live()
    out = PriorityQueue(q1.cmp, q1.extension)
    if q2.t1 is None or q1.t1 is None:
        full, empty = (q1, q2) if q2.t1 is None else (q2, q1)
        _adopt(out, full)
        out.pile.absorb(empty.pile)
        out.pile.add(empty.vs.array, empty.vs.allocated())
        empty.dismissed = True
        out.reclaim_step()
        return out
    if out.cmp.le(q1.t1, q2.t1):
        win, lose = q1, q2
    else:
        win, lose = q2, q1
    # The loser's violations become guarded by its old root.
    lt1 = lose.t1
    if lt1.vlist is None:
        lt1.vlist = Ring(lt1)
    for ring in (lose.vs.active, lose.vs.inactive):
        lt1.vlist.splice(ring)
    lose_rc = [rc for rc in (lose.c1, lose.c2) if rc is not None]
    out.pile.absorb(lose.pile)
    out.pile.add(lose.vs.array, lose.vs.allocated())
    debt, extra = lose.debt, lose.size
    _adopt(out, win)
    lose.dismissed = True
    out.debt += debt
    out.size += extra
    for rc in lose_rc:
        rc.first = False
        rc.queue = out
    # The root of largest rank becomes t2, unless t1 is at least as high.
    t1 = out.t1
    cands = [rc for rc in ([out.c2] if out.c2 else []) + lose_rc]
    best = max(cands, key=lambda rc: rc.root.rank)
    fresh = 0
    if best.root.rank <= t1.rank:
        out.t2 = None
        out.c2 = None
        for rc in cands:
            out._demote(rc, out.c1, False)
    else:
        out.t2 = best.root
        out.c2 = best
        best.first = False
        for rc in cands:
            if rc is not best:
                fresh += out._demote(rc, best, True)
        out._check_t2()
    out.debt += fresh
    for _ in range(TRANSFER_STEPS):
        out.transfer_step()
    out._pay(2)
    out._extend()
    out.reclaim_step()
    return out
