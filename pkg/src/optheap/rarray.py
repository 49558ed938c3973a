'''Resizable array with worst-case constant work per operation.

The array lives in up to two segments.  X is the main segment; Y is a
segment under construction, either twice or half the capacity of X.
Objects with index below ``size(X)`` are read from X, all others from Y.
While Y exists, every grow or shrink moves a constant number of objects
from the end of X into Y, so the copy finishes before another one is due.
'''

__all__ = ['ResizableArray']


class ResizableArray:
    '''Indexable sequence supporting append (grow) and pop (shrink).

    ``last_work`` holds the number of elementary steps (writes, copies and
    allocations) of the latest grow or shrink; ``max_work`` is its running
    maximum.  Both exist so tests can check that no call does more than a
    fixed amount of work.
    '''

    __slots__ = ('_x', '_xcap', '_y', '_ycap', '_xsize', '_n',
                 'last_work', 'max_work')

    GROW_COPIES = 1
    SHRINK_COPIES = 2

    def __init__(self):
        # X is kept physically trimmed to size(X); _xcap is its nominal
        # capacity.  Y is allocated at full capacity.
        self._x = []
        self._xcap = 1
        self._y = None
        self._ycap = 0
        self._xsize = 0
        self._n = 0
        self.last_work = 0
        self.max_work = 0

    # Queries

    def __len__(self):
        return self._n

    @property
    def capacity(self):
        '''Nominal capacity of the main segment X.'''
        return self._xcap

    @property
    def copying(self):
        '''True while a copy into Y is in progress.'''
        return self._y is not None

    @property
    def allocated(self):
        '''Object slots currently held by both segments.'''
        if self._y is None:
            return self._xcap
        return len(self._x) + self._ycap

    def _check(self, i):
        if not 0 <= i < self._n:
            raise IndexError('index %d out of range for size %d' % (i, self._n))

    def __getitem__(self, i):
        if 0 <= i < self._xsize:
            return self._x[i]
        self._check(i)
        return self._y[i]

    def __setitem__(self, i, value):
        if 0 <= i < self._xsize:
            self._x[i] = value
            return
        self._check(i)
        self._y[i] = value

    def __iter__(self):
        for i in range(self._n):
            yield self[i]

    def to_list(self):
        return [self[i] for i in range(self._n)]

    # Mutation

    def _copy(self, k):
        '''Move up to k objects from the end of X into Y.'''
        work = 0
        while k > 0 and self._xsize > 0:
            self._xsize -= 1
            self._y[self._xsize] = self._x.pop()
            k -= 1
            work += 1
        if self._xsize == 0:
            self._x = self._y
            self._xcap = self._ycap
            self._xsize = self._n
            self._y = None
            self._ycap = 0
            # X is trimmed to its logical size; pad back to capacity only
            # lazily through appends.
            del self._x[self._n:]
            work += 1
        return work

    def _account(self, work):
        self.last_work = work
        if work > self.max_work:
            self.max_work = work

    def grow(self, value=None):
        '''Append ``value`` at index ``len(self)``.'''
        work = 1
        if self._y is None and self._n == self._xcap:
            self._ycap = 2 * self._xcap
            self._y = [None] * self._ycap
            work += 1
        if self._y is not None:
            assert self._n < self._ycap
            self._y[self._n] = value
            self._n += 1
            work += self._copy(self.GROW_COPIES)
        else:
            assert len(self._x) == self._n
            self._x.append(value)
            self._xsize += 1
            self._n += 1
        self._account(work)

    def shrink(self):
        '''Remove and return the object at index ``len(self) - 1``.'''
        if self._n == 0:
            raise IndexError('shrink of an empty array')
        work = 1
        self._n -= 1
        if self._n >= self._xsize:
            value = self._y[self._n]
            self._y[self._n] = None
        else:
            assert self._xsize == self._n + 1 and len(self._x) == self._xsize
            value = self._x.pop()
            self._xsize -= 1
        if (self._y is None and self._xcap >= 4
                and self._n == self._xcap // 4):
            self._ycap = self._xcap // 2
            self._y = [None] * self._ycap
            work += 1
            if self._xsize == 0:
                work += self._copy(0)
        if self._y is not None:
            work += self._copy(self.SHRINK_COPIES)
        self._account(work)
        return value

    def validate(self):
        '''Check the segment bookkeeping; raise AssertionError if broken.'''
        assert 0 <= self._xsize <= self._n
        assert len(self._x) == self._xsize
        assert self._xsize <= self._xcap
        if self._y is None:
            assert self._xsize == self._n
        else:
            assert self._ycap in (2 * self._xcap, self._xcap // 2)
            assert self._n <= self._ycap
        return True

    def __repr__(self):
        return 'ResizableArray(%r)' % (self.to_list(),)
