'''Process-wide work tallies read by the measurement harness.

The structure modules bump these counters; the harness takes differences
around each operation.  Element comparisons are counted separately by each
queue's ``Comparator``.
'''

__all__ = ['Tally', 'TALLY']


class Tally:
    __slots__ = ('edits', 'fixes', 'relinks')

    def __init__(self):
        self.edits = 0
        self.fixes = 0
        self.relinks = 0

    def snapshot(self):
        return (self.edits, self.fixes, self.relinks)


TALLY = Tally()
