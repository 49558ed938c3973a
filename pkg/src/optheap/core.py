'''Nodes, multi-way trees and the rank rules.

Every node stores its element, its rank and the links of the two kinds of
lists it takes part in:

* the sibling list of its parent (``left`` and ``right``; the last child's
  ``right`` points at the parent, so a node is the last child of ``y``
  exactly when ``y.last_child is node``);
* a violation list (``vprev`` and ``vnext``), when it is recorded as a
  node that may be smaller than its parent.

``vlist`` is the sentinel of the ring of violations guarded by the node.
``vring`` names the ring the node was last inserted into; it is only
meaningful when compared against the rings of the current owner.

Children are kept in non-decreasing rank order and the rank of a node is
one more than the rank of its last child (zero for a leaf).  Children with
consecutive or equal ranks form groups, and every group has at least two
members.  The single exception is a rank-0 node that is the only child of
its parent: joining two leaves produces exactly that shape.
'''

from .instrument import TALLY

__all__ = ['Comparator', 'Node', 'Ring', 'join', 'split', 'detach_subtree',
           'case1_eligible', 'node_swap', 'children', 'unlink',
           'insert_after', 'insert_before', 'append_child', 'replace',
           'is_root', 'is_last_child', 'parent_if_last', 'is_singleton',
           'is_only_leaf',
           'validate_node', 'subtree_size', 'fibonacci', 'dump',
           'iter_subtree']


class Comparator:
    '''Instrumented element comparison.

    ``le(a, b)`` compares the elements at nodes ``a`` and ``b`` and counts
    one comparison.  On equal elements it answers True, so the first
    argument wins ties.
    '''

    __slots__ = ('count',)

    def __init__(self):
        self.count = 0

    def le(self, a, b):
        self.count += 1
        return not (b.element < a.element)

    def lt(self, a, b):
        self.count += 1
        return a.element < b.element


class Ring:
    '''Sentinel of a circular doubly linked violation ring.'''

    __slots__ = ('vprev', 'vnext', 'owner')

    def __init__(self, owner=None):
        self.vprev = self
        self.vnext = self
        self.owner = owner

    def empty(self):
        return self.vnext is self

    def push(self, x):
        '''Append node x at the end of the ring.'''
        last = self.vprev
        x.vprev = last
        x.vnext = self
        last.vnext = x
        self.vprev = x
        x.vring = self

    def __iter__(self):
        x = self.vnext
        while x is not self:
            nxt = x.vnext
            yield x
            x = nxt

    def __len__(self):
        return sum(1 for _ in self)

    def splice(self, other):
        '''Move every node of ring ``other`` to the end of this ring.'''
        if other.vnext is other:
            return
        first, last = other.vnext, other.vprev
        mine = self.vprev
        mine.vnext = first
        first.vprev = mine
        last.vnext = self
        self.vprev = last
        other.vnext = other.vprev = other


class Node:
    '''One element of a priority queue.

    The caller owns the node: it is created with an element and handed to
    ``insert``, and it comes back from ``delete_min`` or ``delete`` fully
    detached.
    '''

    __slots__ = ('element', 'rank', 'left', 'right', 'last_child',
                 'vlist', 'vprev', 'vnext', 'vring', 'seq')

    def __init__(self, element, seq=None):
        self.element = element
        self.rank = 0
        self.left = None
        self.right = None
        self.last_child = None
        self.vlist = None
        self.vprev = None
        self.vnext = None
        self.vring = None
        self.seq = seq

    @property
    def violating(self):
        return self.vprev is not None

    def detached(self):
        return (self.left is None and self.right is None
                and self.last_child is None and self.vprev is None
                and self.rank == 0)

    def __repr__(self):
        return 'Node(%r, rank=%d)' % (self.element, self.rank)


# Sibling-list primitives


def is_root(x):
    return x.right is None


def is_last_child(x):
    return x.right is not None and x.right.last_child is x


def parent_if_last(x):
    '''Parent of x when x is its last child, otherwise None.'''
    y = x.right
    if y is not None and y.last_child is x:
        return y
    return None


def children(x):
    '''Children of x from first to last.'''
    out = []
    c = x.last_child
    while c is not None:
        out.append(c)
        c = c.left
    out.reverse()
    return out


def _update_rank(p):
    p.rank = p.last_child.rank + 1 if p.last_child is not None else 0


def unlink(x):
    '''Remove non-root x from its sibling list; the parent's rank is not
    recomputed.'''
    TALLY.edits += 1
    left, right = x.left, x.right
    if right.last_child is x:
        right.last_child = left
        if left is not None:
            left.right = right
    else:
        right.left = left
        if left is not None:
            left.right = right
    x.left = None
    x.right = None


def insert_after(x, a):
    '''Link detached x immediately to the right of sibling a.'''
    TALLY.edits += 1
    right = a.right
    if right.last_child is a:
        right.last_child = x
    else:
        right.left = x
    x.right = right
    x.left = a
    a.right = x


def insert_before(x, b):
    '''Link detached x immediately to the left of sibling b.'''
    TALLY.edits += 1
    left = b.left
    x.left = left
    x.right = b
    b.left = x
    if left is not None:
        left.right = x


def append_child(p, x):
    '''Make detached x the last child of p and update p's rank.'''
    TALLY.edits += 1
    last = p.last_child
    x.left = last
    x.right = p
    if last is not None:
        last.right = x
    p.last_child = x
    p.rank = x.rank + 1


def replace(old, new):
    '''Put detached ``new`` in the sibling-list position of ``old``.'''
    TALLY.edits += 1
    left, right = old.left, old.right
    new.left, new.right = left, right
    if left is not None:
        left.right = new
    if right is not None:
        if right.last_child is old:
            right.last_child = new
        else:
            right.left = new
    old.left = old.right = None


def _right_sibling(x):
    r = x.right
    if r is None or r.last_child is x:
        return None
    return r


def is_only_leaf(c):
    '''True for a rank-0 child without siblings (the permitted lone group).'''
    return c.rank == 0 and c.left is None and _right_sibling(c) is None


def is_singleton(c):
    '''True when child c forms a group on its own that is not permitted.'''
    left = c.left
    if left is not None and left.rank >= c.rank - 1:
        return False
    right = _right_sibling(c)
    if right is not None and right.rank <= c.rank + 1:
        return False
    return not (c.rank == 0 and left is None and right is None)


# Join and split


def join(a, b, cmp):
    '''Link two detached trees of equal rank; one comparison.'''
    assert a.rank == b.rank, (a.rank, b.rank)
    assert a.right is None and b.right is None
    if cmp.le(a, b):
        append_child(a, b)
        return a
    append_child(b, a)
    return b


def split(a):
    '''Detach the last subtree of a, plus the last-group singleton if the
    removal leaves one.

    Returns ``(top, extra, a)`` where ``top`` is the former last child,
    ``extra`` is the detached singleton or None, and ``a`` carries its
    recomputed rank.  No comparisons.
    '''
    assert a.rank >= 1 and a.last_child is not None
    top = a.last_child
    unlink(top)
    extra = None
    c = a.last_child
    if c is not None and is_singleton(c):
        unlink(c)
        extra = c
    _update_rank(a)
    return top, extra, a


def case1_eligible(x):
    '''Can x be cut away without changing its parent's rank and without
    leaving the last group of its parent with a single member?'''
    if x.right is None:
        return False
    left = x.left
    if x.right.last_child is x:
        if left is None or left.rank != x.rank:
            return False
        # left becomes the last child; it needs a partner on its left
        # unless it is a leaf left alone.
        if left.left is None:
            return left.rank == 0
        return left.left.rank >= left.rank - 1
    right = x.right
    if is_last_child(right):
        if left is None:
            return right.rank == 0
        if left.rank < right.rank - 1:
            return False
    return True


def detach_subtree(x):
    '''Cut x out of its sibling list (x must satisfy case1_eligible).

    Returns the list of detached trees: x first, then up to two neighbours
    that the removal left as single-member groups.
    '''
    assert case1_eligible(x)
    left = x.left
    right = _right_sibling(x)
    unlink(x)
    out = [x]
    if left is not None and is_singleton(left):
        unlink(left)
        out.append(left)
    if right is not None and not is_last_child(right) and is_singleton(right):
        unlink(right)
        out.append(right)
    return out


# Node swap


_SWAP_FIELDS = ('rank', 'left', 'right', 'last_child', 'vlist', 'vprev',
                'vnext', 'vring')
_LINK_FIELDS = ('left', 'right', 'last_child', 'vprev', 'vnext')


def node_swap(x, y):
    '''Exchange the structural positions of x and y.

    Elements and node identities stay put; ranks, sibling and child links,
    violation-list membership and the guarded violation ring move with the
    position.  Containers outside the nodes (counter slots, the violation
    array, queue roots) are the caller's business.
    '''
    if x is y:
        return
    TALLY.edits += 1

    def m(v):
        if v is x:
            return y
        if v is y:
            return x
        return v

    neighbours = {}
    for node in (x, y):
        for f in _LINK_FIELDS:
            v = getattr(node, f)
            if v is not None and v is not x and v is not y:
                neighbours[id(v)] = v
    for v in neighbours.values():
        for f in _LINK_FIELDS:
            if hasattr(v, f):
                w = getattr(v, f)
                if w is x:
                    setattr(v, f, y)
                elif w is y:
                    setattr(v, f, x)
    xs = [getattr(x, f) for f in _SWAP_FIELDS]
    ys = [getattr(y, f) for f in _SWAP_FIELDS]
    for f, vx, vy in zip(_SWAP_FIELDS, xs, ys):
        if f in _LINK_FIELDS:
            setattr(x, f, m(vy))
            setattr(y, f, m(vx))
        else:
            setattr(x, f, vy)
            setattr(y, f, vx)
    for ring in (x.vlist, y.vlist):
        if ring is not None:
            ring.owner = m(ring.owner)


# Validation helpers


def fibonacci(r):
    '''F_0 = F_1 = 1, F_r = F_{r-1} + F_{r-2}.'''
    a, b = 1, 1
    for _ in range(r):
        a, b = b, a + b
    return a


def iter_subtree(x):
    stack = [x]
    while stack:
        v = stack.pop()
        yield v
        c = v.last_child
        while c is not None:
            stack.append(c)
            c = c.left


def subtree_size(x):
    return sum(1 for _ in iter_subtree(x))


def rank_sequence(x):
    '''Children multiplicities per rank, as a list indexed by rank.'''
    seq = [0] * x.rank
    for c in children(x):
        if c.rank >= len(seq):
            seq.extend([0] * (c.rank + 1 - len(seq)))
        seq[c.rank] += 1
    return seq


def validate_node(x, root_child=False, sizes=None):
    '''Check the local rank rules at x; return a list of problem strings.

    ``root_child`` relaxes the sibling rule for children of a root.
    ``sizes`` may map ``id(node)`` to its subtree size to avoid repeated
    walks.
    '''
    problems = []
    kids = children(x)
    expected = kids[-1].rank + 1 if kids else 0
    if x.rank != expected:
        problems.append('rank of %r is %d, expected %d' % (x.element, x.rank,
                                                           expected))
    for a, b in zip(kids, kids[1:]):
        if a.rank > b.rank:
            problems.append('children of %r out of rank order' % (x.element,))
            break
    for c in kids:
        if c.right is not None and c.right is not x and c.right.left is not c:
            problems.append('broken sibling link at %r' % (c.element,))
    seq = rank_sequence(x)
    for i, d in enumerate(seq):
        if d > 3:
            problems.append('rank %d appears %d times below %r' %
                            (i, d, x.element))
        if d == 1:
            lower = seq[i - 1] if i >= 1 else 0
            higher = seq[i + 1] if i + 1 < len(seq) else 0
            if lower == 0 and higher == 0 and not (i == 0 and len(kids) == 1):
                problems.append('single-member group of rank %d below %r' %
                                (i, x.element))
    size = sizes[id(x)] if sizes is not None else subtree_size(x)
    if size < fibonacci(x.rank):
        problems.append('subtree of %r has size %d < F_%d' % (x.element, size,
                                                               x.rank))
    if x.right is not None and not root_child and not is_only_leaf(x):
        left = x.left
        right = _right_sibling(x)
        ok = ((left is not None and left.rank >= x.rank - 1) or
              (right is not None and right.rank <= x.rank + 1))
        if not ok:
            problems.append('%r has no sibling of nearby rank' % (x.element,))
    return problems


def dump(x):
    '''Parenthesised text form: ``(<element>:<rank> child child ...)``.'''
    parts = ['(%s:%d' % (x.element, x.rank)]
    for c in children(x):
        parts.append(' ')
        parts.append(dump(c))
    parts.append(')')
    return ''.join(parts)
