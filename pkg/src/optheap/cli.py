'''Command-line front end: fuzz, bench, replay and counter scripts.

Exit codes: 0 when every check passes, 1 on a property failure, 2 on a
usage or parse error.
'''

import argparse
import csv
import io
import json
import os
import sys

from . import core
from .counter import ExtendedRegularCounter
from .harness import (EPSILON, DEFAULT_SLACK, Divergence, Executor,
                      TraceError, WORKLOADS, config_meta, delete_min_bound,
                      format_op, fuzz, measure, parse_trace, summarize,
                      workload)
from .queue import DEFAULT_EXTENSION

__all__ = ['main', 'build_parser', 'run_counter_script']

CONSTANT_OPS = ('insert', 'decrease', 'meld')


def extension_from_env():
    '''Extension constant, overridable through OPTHEAP_EPSILON_RATE.'''
    raw = os.environ.get('OPTHEAP_EPSILON_RATE')
    if raw is None:
        return DEFAULT_EXTENSION
    value = int(raw)
    if value < 1:
        raise ValueError('OPTHEAP_EPSILON_RATE must be a positive integer')
    return value


def cmd_fuzz(args, out):
    ops = []
    ok, msg, _ = fuzz(args.seed, args.ops, args.queues,
                      validate_every=args.validate_every,
                      paranoid=args.paranoid, extension=args.extension,
                      trace=ops)
    meta = config_meta(args.extension)
    print('fuzz seed=%d ops=%d queues=%d extension=%d transfer_steps=%d: %s'
          % (args.seed, len(ops), args.queues, meta['extension'],
             meta['transfer_steps'], msg), file=out)
    if not ok:
        if args.out:
            with open(args.out, 'w', encoding='utf-8') as fh:
                for op in ops:
                    fh.write(format_op(op) + '\n')
            print('failing trace written to %s' % args.out, file=out)
        return 1
    return 0


def _emit(rows, fmt, meta, out):
    if fmt == 'json':
        out.write(json.dumps({'meta': meta, 'rows': rows}, indent=2) + '\n')
        return
    cols = ['workload', 'n', 'op', 'n_bucket', 'max_comparisons',
            'mean_comparisons', 'max_fixes', 'max_edits']
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, extrasaction='ignore',
                       lineterminator='\n')
    w.writeheader()
    for r in rows:
        w.writerow(r)
    out.write(buf.getvalue())


def cmd_bench(args, out):
    sizes = args.n or [1024]
    rows = []
    failures = []
    maxima = {}
    for n in sizes:
        stats = measure(workload(args.workload, n, args.seed), args.extension)
        for r in summarize(stats):
            r['workload'] = args.workload
            r['n'] = n
            rows.append(r)
        per_op = {}
        for s in stats:
            if s.op == 'deletemin' and s.n >= 1:
                bound = delete_min_bound(s.n, EPSILON, args.slack)
                if s.comparisons > bound:
                    failures.append('delete_min at size %d used %d comparisons '
                                    '> %.1f' % (s.n, s.comparisons, bound))
            if s.op in CONSTANT_OPS:
                cur = per_op.get(s.op, (0, 0))
                per_op[s.op] = (max(cur[0], s.comparisons), max(cur[1], s.edits))
        maxima[n] = per_op
    if args.assert_bounds and len(sizes) > 1:
        for op in CONSTANT_OPS:
            seen = {n: maxima[n].get(op) for n in sizes if op in maxima[n]}
            if len(set(seen.values())) > 1:
                failures.append('%s maxima (comparisons, edits) vary with n: %r'
                                % (op, seen))
    meta = dict(config_meta(args.extension), epsilon=EPSILON, slack=args.slack,
                workload=args.workload, seed=args.seed)
    _emit(rows, args.format, meta, out)
    if args.assert_bounds and failures:
        for f in failures[:20]:
            print('BOUND FAILED: ' + f, file=sys.stderr)
        return 1
    return 0


def cmd_replay(args, out):
    try:
        with open(args.file, encoding='utf-8') as fh:
            ops = parse_trace(fh)
    except TraceError as exc:
        print('parse error: %s' % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print('cannot read trace: %s' % exc, file=sys.stderr)
        return 2
    ex = Executor(args.extension, check=True,
                  validate_every=args.validate_every, paranoid=args.paranoid)
    for i, op in enumerate(ops, 1):
        try:
            ex.apply(op)
        except Divergence as exc:
            print('divergence: %s' % exc, file=out)
            return 1
        except Exception as exc:
            print('divergence: op %d: %s: %s' % (i, type(exc).__name__, exc),
                  file=out)
            return 1
        if args.dump_every and i % args.dump_every == 0:
            for qid in sorted(ex.queues):
                q = ex.queues[qid]
                roots = ' '.join(core.dump(t) for t in q.roots()) or '()'
                print('after op %d queue %d: %s' % (i, qid, roots), file=out)
    print('replay of %d ops: pass' % len(ops), file=out)
    return 0


def run_counter_script(lines, out):
    '''Run a counter script in pure mode; return (exit_code, message).'''
    c = ExtendedRegularCounter()
    for lineno, raw in enumerate(lines, 1):
        for part in raw.split(';'):
            words = part.split()
            if not words or words[0].startswith('#'):
                continue
            cmd = words[0]
            try:
                if cmd in ('inc', 'dec', 'assert-value'):
                    if len(words) != 2:
                        raise ValueError('%s takes one argument' % cmd)
                    arg = int(words[1])
                elif cmd == 'assert-regular':
                    if len(words) != 1:
                        raise ValueError('assert-regular takes no argument')
                else:
                    raise ValueError('unknown command %r' % cmd)
            except ValueError as exc:
                return 2, 'line %d: %s' % (lineno, exc)
            if cmd == 'inc':
                if not 0 <= arg <= len(c):
                    return 1, 'line %d: inc %d beyond length %d' % (
                        lineno, arg, len(c))
                c.increment(arg)
            elif cmd == 'dec':
                if not 0 <= arg < len(c) or c.value() < (1 << arg):
                    return 1, 'line %d: dec %d on value %d' % (lineno, arg,
                                                               c.value())
                c.decrement(arg)
            elif cmd == 'assert-value':
                if c.value() != arg:
                    return 1, 'line %d: value %d, expected %d' % (
                        lineno, c.value(), arg)
            elif not c.is_regular():
                return 1, 'line %d: irregular digits %r' % (lineno, c.digits())
    return 0, 'ok: digits %s value %d' % (
        ' '.join(map(str, c.digits())) or '(empty)', c.value())


def cmd_counter(args, out):
    try:
        with open(args.script, encoding='utf-8') as fh:
            lines = fh.readlines()
    except OSError as exc:
        print('cannot read script: %s' % exc, file=sys.stderr)
        return 2
    code, msg = run_counter_script(lines, out)
    print(msg, file=out if code == 0 else sys.stderr)
    return code


def build_parser():
    p = argparse.ArgumentParser(prog='optheap', description=__doc__.split('\n')[0])
    sub = p.add_subparsers(dest='command', required=True)

    f = sub.add_parser('fuzz', help='differential fuzzing against an oracle')
    f.add_argument('--ops', type=int, default=10000)
    f.add_argument('--seed', type=int, default=1)
    f.add_argument('--queues', type=int, default=4)
    f.add_argument('--paranoid', action='store_true',
                   help='validate the structure after every operation')
    f.add_argument('--validate-every', type=int, default=64)
    f.add_argument('--out', help='write the trace here on failure')
    f.set_defaults(func=cmd_fuzz)

    b = sub.add_parser('bench', help='comparison counts per operation')
    b.add_argument('--workload', choices=sorted(WORKLOADS), default='drain')
    b.add_argument('--n', type=int, action='append')
    b.add_argument('--seed', type=int, default=0)
    b.add_argument('--format', choices=('json', 'csv'), default='json')
    b.add_argument('--assert-bounds', action='store_true')
    b.add_argument('--slack', type=float, default=DEFAULT_SLACK)
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser('replay', help='run a trace file with checks')
    r.add_argument('file')
    r.add_argument('--dump-every', type=int, default=0)
    r.add_argument('--paranoid', action='store_true')
    r.add_argument('--validate-every', type=int, default=64)
    r.set_defaults(func=cmd_replay)

    c = sub.add_parser('counter', help='run a pure counter script')
    c.add_argument('script')
    c.set_defaults(func=cmd_counter)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        args.extension = extension_from_env()
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    return args.func(args, out)


if __name__ == '__main__':
    sys.exit(main())
