'''Shared recorder for the acceptance suite's one-line verdicts.'''

import pytest

_VERDICTS = pytest.StashKey()


class Verdicts:
    '''Collects (criterion, part, ok, detail) and prints a line per part.'''

    def __init__(self):
        self.parts = {}

    def record(self, criterion, part, ok, detail):
        self.parts.setdefault(criterion, []).append((part, ok, detail))
        print('criterion %d %s: %s (%s)' % (criterion, part,
                                            'PASS' if ok else 'FAIL', detail))
        return ok

    def lines(self):
        out = []
        for cid in sorted(self.parts):
            parts = self.parts[cid]
            ok = all(p[1] for p in parts)
            detail = '; '.join('%s %s: %s' % (name, 'ok' if good else 'FAILED',
                                              info)
                               for name, good, info in parts)
            out.append('criterion %d: %s [%s]' % (cid, 'PASS' if ok else 'FAIL',
                                                  detail))
        return out


@pytest.fixture
def verdicts(request):
    stash = request.config.stash
    if _VERDICTS not in stash:
        stash[_VERDICTS] = Verdicts()
    return stash[_VERDICTS]


def pytest_terminal_summary(terminalreporter, config):
    v = config.stash.get(_VERDICTS, None)
    if v is None or not v.parts:
        return
    terminalreporter.write_sep('=', 'acceptance criteria')
    for line in v.lines():
        terminalreporter.write_line(line)
