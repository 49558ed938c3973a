'''Worst-case efficient meldable priority queue with instrumentation.'''

from .core import Comparator, Node
from .counter import ExtendedRegularCounter
from .queue import (AliasingError, DismissedQueueError, EmptyQueueError,
                    NotEmptyError, PriorityQueue, meld)
from .rarray import ResizableArray

__all__ = ['Comparator', 'Node', 'ExtendedRegularCounter', 'PriorityQueue',
           'meld', 'ResizableArray', 'EmptyQueueError', 'NotEmptyError',
           'AliasingError', 'DismissedQueueError']
