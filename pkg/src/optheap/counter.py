'''Extended regular binary counter.

A number is a digit string d_0 d_1 ... d_{l-1}, least-significant digit
first, with every digit in {0,1,2,3} and the last digit nonzero.  The
string is *regular* when every 3 has a 0 or 1 somewhere below it with only
2's in between, and every 0 has a 2 or 3 below it with only 1's in
between.  Increment and decrement at any position touch a constant number
of digits thanks to forward pointers: every digit that belongs to a block
(a run of the form 12*3, 02*3, 21*0 or 31*0, minus its last digit) points
at the last digit of that block.

The counter runs in two modes.  In pure mode it only tracks digits.  In
attached mode every slot also stores the trees of the corresponding rank
hanging below a root, and every carry or borrow is realised by a join or a
split through a ``FixCallbacks`` object.
'''

from .instrument import TALLY
from .rarray import ResizableArray

__all__ = ['DigitSlot', 'FixCallbacks', 'ExtendedRegularCounter',
           'is_regular_digits', 'digits_value']


def is_regular_digits(digits):
    '''Check the regularity rules on a plain digit sequence.'''
    digits = list(digits)
    if digits and digits[-1] == 0:
        return False
    for k, d in enumerate(digits):
        if d not in (0, 1, 2, 3):
            return False
        if d == 3:
            m = k - 1
            while m >= 0 and digits[m] == 2:
                m -= 1
            if m < 0 or digits[m] not in (0, 1):
                return False
        elif d == 0:
            m = k - 1
            while m >= 0 and digits[m] == 1:
                m -= 1
            if m < 0 or digits[m] not in (2, 3):
                return False
    return True


def digits_value(digits):
    return sum(d << i for i, d in enumerate(digits))


def block_of(digits, p):
    '''Return (start, end) of the block having position p as a member.

    ``end`` is the index of the distinguishing digit.  Positions that are
    not block members give None.
    '''
    n = len(digits)
    d = digits[p]
    # Blocks ending in 3: (0|1) 2* 3
    if d in (0, 1, 2):
        m = p
        if d == 2:
            while m >= 0 and digits[m] == 2:
                m -= 1
            if m >= 0 and digits[m] not in (0, 1):
                m = -1
        if m >= 0:
            k = p + 1
            while k < n and digits[k] == 2:
                k += 1
            if k < n and digits[k] == 3:
                return (m, k)
    # Blocks ending in 0: (2|3) 1* 0
    if d in (1, 2, 3):
        m = p
        if d == 1:
            while m >= 0 and digits[m] == 1:
                m -= 1
            if m < 0 or digits[m] not in (2, 3):
                return None
        k = p + 1
        while k < n and digits[k] == 1:
            k += 1
        if k < n and digits[k] == 0:
            return (m, k)
    return None


class DigitSlot:
    '''One position of the counter: digit, forward pointer, stored trees.'''

    __slots__ = ('digit', 'forward', 'trees')

    def __init__(self, forward):
        self.digit = 0
        self.forward = forward
        self.trees = []

    def __repr__(self):
        return 'DigitSlot(%d, f=%d, %d trees)' % (self.digit, self.forward,
                                                  len(self.trees))


class FixCallbacks:
    '''Bridge between digit changes and tree operations.

    Subclasses implement ``on_join`` (two trees of rank r into one of rank
    r+1, with exactly one element comparison) and ``on_split`` (one tree of
    rank r+1 into ``(top, extra, rest)``: the detached last subtree, the
    optional detached singleton, and the remaining root).  ``on_attach``
    and ``on_detach`` report every tree entering or leaving a slot.
    '''

    def rank(self, tree):
        return tree.rank

    def on_join(self, a, b):
        raise NotImplementedError

    def on_split(self, tree):
        raise NotImplementedError

    def on_attach(self, tree, pos):
        pass

    def on_detach(self, tree, pos):
        pass


class _EarlyExit(Exception):
    '''A borrow at the target position came back with an unchanged string.'''


class ExtendedRegularCounter:
    '''Digit string with forward pointers and optional attached trees.

    Statistics of the latest top-level operation are kept in ``last_fixes``
    and ``last_writes`` (fixes and digit writes of the operation proper)
    and ``last_relinks`` (forward pointers rewritten after an irregular
    split).  Increments issued to re-insert leftover trees after a
    decrement are counted in ``last_extra``.
    '''

    def __init__(self, callbacks=None):
        self.cb = callbacks
        self.slots = ResizableArray()
        self.last_fixes = 0
        self.last_writes = 0
        self.last_relinks = 0
        self.last_extra = 0
        self.total_fixes = 0
        self.total_writes = 0
        self._stored = []

    @classmethod
    def from_digits(cls, digits):
        '''Pure-mode counter holding the given digits, with every block
        member pointing at its distinguishing digit.  The digits need not
        be regular, so intermediate states can be set up.'''
        c = cls()
        digits = list(digits)
        c._ensure(len(digits))
        for i, d in enumerate(digits):
            assert d in (0, 1, 2, 3)
            c.slots[i].digit = d
        for p in range(len(digits)):
            b = block_of(digits, p)
            if b is not None:
                c.slots[p].forward = b[1]
        return c

    # Queries

    def __len__(self):
        return len(self.slots)

    @property
    def length(self):
        return len(self.slots)

    @property
    def attached(self):
        return self.cb is not None

    def digit(self, i):
        if i >= len(self.slots):
            return 0
        return self.slots[i].digit

    def digits(self):
        return [s.digit for s in self.slots]

    def forwards(self):
        return [s.forward for s in self.slots]

    def trees(self, i):
        '''Trees stored at position i (a list; do not mutate).'''
        if i >= len(self.slots):
            return []
        return self.slots[i].trees

    def all_trees(self):
        for s in self.slots:
            yield from s.trees

    def contains(self, tree, pos):
        if pos >= len(self.slots):
            return False
        return any(t is tree for t in self.slots[pos].trees)

    def value(self):
        return digits_value(self.digits())

    def is_regular(self):
        return is_regular_digits(self.digits())

    def forward_ok(self):
        '''Every block member points at its distinguishing digit.'''
        d = self.digits()
        for p in range(len(d)):
            b = block_of(d, p)
            if b is not None and self.slots[p].forward != b[1]:
                return False
        return True

    def allocated(self):
        return self.slots.allocated

    # Low-level slot edits

    def _ensure(self, n):
        while len(self.slots) < n:
            self.slots.grow(DigitSlot(len(self.slots)))

    def _trim(self):
        slots = self.slots
        n = len(slots)
        while n and slots[n - 1].digit == 0:
            assert not slots[n - 1].trees
            slots.shrink()
            n -= 1

    def _write(self, i, value):
        self.slots[i].digit = value
        TALLY.edits += 1
        self.last_writes += 1
        self.total_writes += 1

    def _write_slot(self, slot, value):
        slot.digit = value
        TALLY.edits += 1
        self.last_writes += 1
        self.total_writes += 1

    def _put(self, i, tree):
        cb = self.cb
        if cb is None:
            return
        assert cb.rank(tree) == i, (cb.rank(tree), i)
        self.slots[i].trees.append(tree)
        cb.on_attach(tree, i)

    def _take(self, i, tree=None, avoid=None):
        if self.cb is None:
            return None
        trees = self.slots[i].trees
        if tree is None:
            k = len(trees) - 1
            if avoid is not None and trees[k] is avoid:
                k -= 1
        else:
            k = 0
            while trees[k] is not tree:
                k += 1
        tree = trees.pop(k)
        self.cb.on_detach(tree, i)
        return tree

    def _set_forward(self, j):
        nxt = self.slots[j + 1]
        if nxt.digit in (0, 3):
            self.slots[j].forward = j + 1
        else:
            self.slots[j].forward = nxt.forward

    def _relink(self, lo, hi):
        '''Recompute forward pointers of blocks through positions lo..hi.'''
        d = self.digits()
        for p in range(max(lo, 0), min(hi, len(d) - 1) + 1):
            b = block_of(d, p)
            if b is not None:
                for q in range(b[0], b[1]):
                    if self.slots[q].forward != b[1]:
                        self.slots[q].forward = b[1]
                        self.last_relinks += 1
                        TALLY.relinks += 1
                        TALLY.edits += 1

    # Fixes

    def fix_carry(self, j):
        '''Turn a 3 at position j into 1 and carry one unit to j+1.'''
        assert 0 <= j < len(self.slots) and self.slots[j].digit == 3
        self.last_fixes += 1
        self.total_fixes += 1
        TALLY.fixes += 1
        self._ensure(j + 2)
        here = self.slots[j]
        up = self.slots[j + 1]
        cb = self.cb
        if cb is not None:
            trees = here.trees
            a = trees.pop(0)
            cb.on_detach(a, j)
            b = trees.pop(0)
            cb.on_detach(b, j)
        self._write_slot(here, 1)
        if cb is not None:
            self._put(j + 1, cb.on_join(a, b))
        self._write_slot(up, up.digit + 1)
        if up.digit == 3:
            here.forward = j + 1
        else:
            here.forward = up.forward

    def fix_borrow(self, j, pending=None, top=False, avoid=None):
        '''Turn a 0 at position j into 2 by borrowing one unit from j+1.

        In attached mode a tree of rank j+1 is split.  Splits that do not
        yield exactly two rank-j trees are resolved here: an unchanged
        root goes back to slot j+1 with only one new tree at j; a leftover
        lower-rank tree is queued on ``pending`` for a later increment; a
        rank-(j-1) leftover is stored at j-1, followed by one join there if
        that slot overflows.  Forward pointers around the touched positions
        are then recomputed.
        '''
        assert 0 <= j < len(self.slots) - 1 and self.slots[j].digit == 0
        self.last_fixes += 1
        self.total_fixes += 1
        TALLY.fixes += 1
        if self.cb is None:
            self._borrow_digits(j)
            return
        rank = self.cb.rank
        tree = self._take(j + 1, avoid=avoid)
        top_tree, extra, rest = self.cb.on_split(tree)
        assert rank(top_tree) == j
        if extra is None and rank(rest) == j + 1:
            # The root kept its rank: one rank-j tree gained, none lost.
            self._put(j, top_tree)
            self._put(j + 1, rest)
            self._write(j, 1)
            if top:
                raise _EarlyExit()
            return
        if extra is None:
            assert rank(rest) == j
            self._put(j, top_tree)
            self._put(j, rest)
            self._borrow_digits(j)
            return
        assert rank(rest) < rank(extra) or rank(rest) == rank(extra) == 0
        pending.append(rest)
        if rank(extra) == j:
            self._put(j, top_tree)
            self._put(j, extra)
            self._borrow_digits(j)
            return
        assert j >= 1 and rank(extra) == j - 1
        # One tree of rank j and one of rank j-1: store both.  Slot j-1 may
        # then hold three or four trees, and one join there restores it.
        self._stored.append(j)
        self._put(j - 1, extra)
        self._put(j, top_tree)
        self._write(j - 1, self.slots[j - 1].digit + 1)
        self._write(j, 1)
        self._write(j + 1, self.slots[j + 1].digit - 1)
        if self.slots[j - 1].digit >= 3:
            a, b = [t for t in self.slots[j - 1].trees if t is not avoid][:2]
            self._take(j - 1, a)
            self._take(j - 1, b)
            self._put(j, self.cb.on_join(a, b))
            self._write(j - 1, self.slots[j - 1].digit - 2)
            self._write(j, self.slots[j].digit + 1)
        self._trim()
        self._relink(j - 2, j + 1)

    def _borrow_digits(self, j):
        self._write(j, 2)
        self._write(j + 1, self.slots[j + 1].digit - 1)
        self._set_forward(j)

    # Increment and decrement

    def _begin(self):
        self.last_fixes = 0
        self.last_writes = 0
        self.last_relinks = 0
        self.last_extra = 0

    def increment(self, i, tree=None):
        '''Add 2**i; in attached mode store ``tree`` (of rank i) at slot i.'''
        self._begin()
        self._increment(i, tree)

    def _increment(self, i, tree):
        slots = self.slots
        assert 0 <= i <= len(slots), (i, len(slots))
        assert (tree is None) == (self.cb is None)
        if i == len(slots):
            self._ensure(i + 1)
        slot = slots[i]
        if slot.digit == 3:
            self.fix_carry(i)
        j = slot.forward
        if j < len(slots) and slots[j].digit == 3:
            self.fix_carry(j)
        self._put(i, tree)
        self._write_slot(slot, slot.digit + 1)
        if slot.digit == 3:
            self.fix_carry(i)
        self._trim()

    def decrement(self, i, tree=None):
        '''Subtract 2**i and return the removed tree (attached mode).

        ``tree`` selects a specific stored tree of rank i; otherwise the
        most recently stored one is taken.
        '''
        self._begin()
        slots = self.slots
        assert 0 <= i < len(slots), (i, len(slots))
        assert tree is None or self.contains(tree, i)
        pending = []
        saved = None
        self._stored = []
        try:
            if slots[i].digit == 0:
                self.fix_borrow(i, pending, top=True)
            j = slots[i].forward
            if j < len(slots) - 1 and slots[j].digit == 0:
                self.fix_borrow(j, pending, avoid=tree)
            assert slots[i].digit > 0
            saved = self._take(i, tree)
            self._write(i, slots[i].digit - 1)
            if i < len(slots) - 1 and slots[i].digit == 0:
                self.fix_borrow(i, pending)
        except _EarlyExit:
            saved = self._take(i)
            self._write(i, 0)
        self._trim()
        if self._stored:
            # The final digit change may extend a block over positions the
            # stored split did not relink.
            marks = self._stored + [i]
            self._relink(min(marks) - 2, max(marks) + 1)
        fixes, writes, relinks = self.last_fixes, self.last_writes, self.last_relinks
        for t in pending:
            self._increment(self.cb.rank(t), t)
        self.last_extra = len(pending)
        self.last_fixes, self.last_writes = fixes, writes
        self.last_relinks = relinks
        return saved

    def __repr__(self):
        return 'ExtendedRegularCounter(%r)' % (self.digits(),)
