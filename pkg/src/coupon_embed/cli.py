"""Command-line front end: ``coupon-embed {analyze,semigroup,simulate,verify}``.

Exit codes: 0 success / embeddable, 1 input error, 2 not embeddable,
3 singular (not embeddable), 4 verification failure.
"""

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__, algebra, checks, embedding, lattice, model, oracle, sim
from .exceptions import CouponEmbedError, NotGenerator
from .specfile import SpecError, load_spec

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_EMBEDDABLE = 2
EXIT_SINGULAR = 3
EXIT_VERIFY_FAILED = 4

_EXIT_FOR = {
    embedding.Outcome.EMBEDDABLE: EXIT_OK,
    embedding.Outcome.NOT_EMBEDDABLE: EXIT_NOT_EMBEDDABLE,
    embedding.Outcome.SINGULAR: EXIT_SINGULAR,
}


class InputError(Exception):
    pass


def subset_label(mask):
    return '{' + ','.join(str(e) for e in lattice.elements_of(mask)) + '}'


def _entry(mask, value):
    return {'subset': lattice.elements_of(mask), 'mask': int(mask), 'value': float(value)}


def _table(vec, n):
    return [_entry(K, vec[K]) for K in lattice.canonical_order(n)]


def _tolerances(args):
    return {'verdict': args.tolerance, 'singular': embedding.SINGULAR_TOL,
            'simplex': model.SIMPLEX_TOL}


def _emit(args, report, text_lines):
    if args.quiet:
        return
    if args.output == 'json':
        json.dump(report, sys.stdout, indent=2)
        sys.stdout.write('\n')
    else:
        sys.stdout.write('\n'.join(text_lines) + '\n')


def _load(args):
    try:
        return load_spec(args.spec)
    except (SpecError, CouponEmbedError) as exc:
        raise InputError(str(exc)) from None


def _distribution_of(spec, tol):
    """Distribution for a spec; rate specs are pushed through the semigroup at t=1."""
    x = spec.vector()
    if spec.kind != 'rates':
        return x
    try:
        return algebra.semigroup_params(x, 1.0, tol)
    except NotGenerator as exc:
        raise InputError('rates: %s' % exc) from None


def _generator_rates(spec, tol):
    """Generator rates for a spec, or ``(None, exit_code)`` when there is none."""
    x = spec.vector()
    if spec.kind == 'rates':
        if not model.is_generator_params(x, tol):
            return None, EXIT_NOT_EMBEDDABLE
        return x, EXIT_OK
    verdict = embedding.embeddability_verdict(x, tol)
    if not verdict.embeddable:
        return None, _EXIT_FOR[verdict.outcome]
    return verdict.r, EXIT_OK


# ---------------------------------------------------------------- analyze

def analyze(spec, tol, correlations=False):
    """Full embeddability report for a parsed spec; returns (report, exit code)."""
    p = _distribution_of(spec, tol)
    n = spec.n
    verdict = embedding.embeddability_verdict(p, tol)
    lam = lattice.zeta_subsets(p)
    report = {
        'tool': 'coupon-embed',
        'version': __version__,
        'tolerances': {'verdict': tol, 'singular': embedding.SINGULAR_TOL,
                       'simplex': model.SIMPLEX_TOL},
        'n': n,
        'input_kind': spec.kind,
        'verdict': verdict.outcome.value,
        'witnesses': [lattice.elements_of(k) for k in verdict.witnesses],
        'witness_masks': list(verdict.witnesses),
        'boundary_flags': [lattice.elements_of(k) for k in verdict.boundary_flags],
        'spectrum_simple': verdict.spectrum_simple,
        'p': _table(p, n),
        'lambda': _table(lam, n),
        'q': _table(lam[::-1], n),
    }
    if verdict.r is not None:
        report['r'] = _table(verdict.r, n)
        report['mu'] = _table(np.log(lam), n)
        report['pair_conditions'] = [
            {'pair': [i, j], 'holds': h, 'margin': m}
            for i in range(1, n + 1) for j in range(i + 1, n + 1)
            for h, m in [embedding.pair_condition(p, i, j)]
        ]
    if correlations:
        rep = embedding.correlation_report(p)
        report['correlations'] = [_entry(K, v) for K, v in rep.values.items()]
    if verdict.embeddable:
        if n <= model.MAX_DENSE_N:
            R = model.cg_from_params(verdict.r)
        if n <= checks.DENSE_ORACLE_N:
            residual = float(np.abs(oracle.exp_oracle(R) - model.cm_from_params(p)).max())
            method = 'dense exp of generator vs CM matrix'
        else:
            residual = float(np.abs(algebra.exp_closed(verdict.r) - p).max())
            method = 'closed-form Exp of rates vs p'
        report['reconstruction_residual'] = {'value': residual, 'method': method}
    return report, _EXIT_FOR[verdict.outcome]


def _analyze_text(report):
    lines = ['coupon-embed %s   N = %d   verdict: %s'
             % (report['version'], report['n'], report['verdict'])]
    if report['witnesses']:
        lines.append('witnesses (negative rates): %s' % report['witnesses'])
    if report['boundary_flags']:
        lines.append('boundary (|r_K| <= tol): %s' % report['boundary_flags'])
    lines.append('spectrum simple: %s' % report['spectrum_simple'])
    lam = {e['mask']: e['value'] for e in report['lambda']}
    r = {e['mask']: e['value'] for e in report.get('r', [])}
    width = max(len(subset_label(e['mask'])) for e in report['lambda'])
    lines.append('%-*s  %22s  %22s' % (width, 'K', 'lambda_K', 'r_K'))
    for e in report['lambda']:
        K = e['mask']
        rv = '%22.15g' % r[K] if K in r else '%22s' % '-'
        lines.append('%-*s  %22.15g  %s' % (width, subset_label(K), lam[K], rv))
    for c in report.get('pair_conditions', []):
        lines.append('pair %s: p0*p_ij - p_i*p_j = %.6g (%s)'
                     % (c['pair'], c['margin'], 'ok' if c['holds'] else 'violated'))
    for c in report.get('correlations', []):
        lines.append('C_%s = %.6g' % (subset_label(c['mask']), c['value']))
    if 'reconstruction_residual' in report:
        res = report['reconstruction_residual']
        lines.append('reconstruction residual: %.3g (%s)' % (res['value'], res['method']))
    lines.append('tolerances: %s' % report['tolerances'])
    return lines


def cmd_analyze(args):
    spec = _load(args)
    report, code = analyze(spec, args.tolerance, args.correlations)
    _emit(args, report, _analyze_text(report))
    return code


# -------------------------------------------------------------- semigroup

def parse_grid(text):
    """``'t0..t1:steps'`` -> ``steps + 1`` equally spaced times."""
    try:
        span, steps = text.split(':')
        t0, t1 = span.split('..')
        t0, t1, steps = float(t0), float(t1), int(steps)
    except ValueError:
        raise InputError('grid must look like t0..t1:steps, got %r' % text) from None
    if steps < 1 or t1 < t0 or t0 < 0:
        raise InputError('grid needs 0 <= t0 <= t1 and steps >= 1')
    return list(np.linspace(t0, t1, steps + 1))


def cmd_semigroup(args):
    spec = _load(args)
    r, code = _generator_rates(spec, args.tolerance)
    if r is None:
        if not args.quiet:
            sys.stderr.write('no Markov generator for this spec (exit %d)\n' % code)
        return code
    times = list(args.time or [])
    if args.grid:
        times += parse_grid(args.grid)
    if any(t < 0 for t in times):
        raise InputError('times must be nonnegative')
    times = sorted(set([0.0] + [float(t) for t in times]))
    rows = [algebra.semigroup_params(r, t, args.tolerance) for t in times]
    d = 1 << spec.n
    if args.quiet:
        return EXIT_OK
    if args.output == 'json':
        json.dump({'tool': 'coupon-embed', 'version': __version__,
                   'tolerances': _tolerances(args),
                   'subsets': [lattice.elements_of(k) for k in range(d)],
                   'times': times, 'rows': [row.tolist() for row in rows]},
                  sys.stdout, indent=2)
        sys.stdout.write('\n')
    else:
        writer = csv.writer(sys.stdout, lineterminator='\n')
        writer.writerow(['t'] + [subset_label(k) for k in range(d)])
        for t, row in zip(times, rows):
            writer.writerow([repr(t)] + [repr(float(v)) for v in row])
    return EXIT_OK


# --------------------------------------------------------------- simulate

def simulate(spec, mode, steps, horizon, trials, seed, tol):
    """Monte Carlo estimates vs theory; returns (report, exit code)."""
    report = {'tool': 'coupon-embed', 'version': __version__, 'mode': mode,
              'n': spec.n, 'trials': trials, 'seed': seed,
              'rng': 'numpy Philox4x64, key (seed, block)'}
    d = 1 << spec.n
    if mode == 'continuous':
        r, code = _generator_rates(spec, tol)
        if r is None:
            return None, code
        states = sim.simulate_continuous(r, horizon, trials, seed)
        theory = algebra.semigroup_params(r, horizon, tol)
        report['horizon'] = horizon
    else:
        p = _distribution_of(spec, tol)
        states = sim.simulate_discrete(p, steps, trials, seed)
        theory = model.cm_power_params(p, steps, 'spectral') if steps else algebra.unit(spec.n)
        report['steps'] = steps
        if steps == 1 and d * trials <= 5 * 10 ** 7:
            est = sim.empirical_transition(p, trials, seed)
            M = model.cm_from_params(p)
            report['transition_max_deviation'] = float(np.abs(est - M).max())
    empirical = np.bincount(states, minlength=d) / float(trials)
    report['marginal'] = [{'subset': lattice.elements_of(k), 'empirical': float(empirical[k]),
                           'theory': float(theory[k])} for k in range(d)]
    report['marginal_max_deviation'] = float(np.abs(empirical - theory).max())
    return report, EXIT_OK


def cmd_simulate(args):
    spec = _load(args)
    if args.trials < 1 or args.steps < 0 or args.horizon < 0:
        raise InputError('need trials >= 1, steps >= 0, horizon >= 0')
    report, code = simulate(spec, args.mode, args.steps, args.horizon, args.trials,
                            args.seed, args.tolerance)
    if report is None:
        if not args.quiet:
            sys.stderr.write('continuous mode needs a Markov generator (exit %d)\n' % code)
        return code
    if args.trajectory:
        rng = sim.make_rng(args.seed, 1 << 62)
        if args.mode == 'continuous':
            r, _ = _generator_rates(spec, args.tolerance)
            traj = sim.run_continuous(r, args.horizon, rng=rng)
        else:
            traj = sim.run_discrete(_distribution_of(spec, args.tolerance), args.steps, rng=rng)
        with open(args.trajectory, 'w', newline='', encoding='utf-8') as fh:
            sim.write_trajectory_csv(traj, fh)
        report['trajectory_file'] = args.trajectory
    lines = ['mode %s, N = %d, %d trials, seed %d' % (args.mode, spec.n, args.trials, args.seed),
             'max |empirical - theory| of marginal: %.3g' % report['marginal_max_deviation']]
    if 'transition_max_deviation' in report:
        lines.append('max |empirical - exact| one-step matrix: %.3g'
                     % report['transition_max_deviation'])
    _emit(args, report, lines)
    return EXIT_OK


# ----------------------------------------------------------------- verify

def cmd_verify(args):
    groups = []
    if args.random:
        n, count, seed = args.random
        if not 1 <= n <= lattice.MAX_VECTOR_N or count < 1:
            raise InputError('--random needs 1 <= n <= %d and count >= 1' % lattice.MAX_VECTOR_N)
        rng = np.random.default_rng(seed)
        for _ in range(count):
            p = checks.random_distribution(n, rng, min_empty=rng.uniform(0.05, 0.6))
            groups.append(checks.run_checks(p, args.level, args.inject_fault, args.tolerance, rng))
        source = 'random N=%d count=%d seed=%d' % (n, count, seed)
    elif args.spec:
        spec = _load(args)
        p = _distribution_of(spec, args.tolerance)
        groups.append(checks.run_checks(p, args.level, args.inject_fault, args.tolerance))
        source = args.spec
    else:
        raise InputError('verify needs a spec file or --random n count seed')
    results = checks.merge_results(groups)
    failed = [r.name for r in results if not r.passed]
    report = {'tool': 'coupon-embed', 'version': __version__, 'source': source,
              'level': args.level, 'inject_fault': args.inject_fault,
              'tolerances': _tolerances(args),
              'checks': [r.to_dict() for r in results], 'failed': failed}
    lines = []
    for r in results:
        status = 'SKIP' if r.skipped else ('PASS' if r.passed else 'FAIL')
        detail = r.skipped or 'residual %.3g <= %.1e' % (r.residual, r.threshold)
        if status == 'FAIL':
            detail = 'residual %.3g > %.1e' % (r.residual, r.threshold)
        lines.append('%-4s %-32s %s' % (status, r.name, detail))
    lines.append('%d checks, %d failed' % (len(results), len(failed)))
    _emit(args, report, lines)
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


# ------------------------------------------------------------------ main

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--tolerance', type=float, default=embedding.VERDICT_TOL,
                        help='verdict tolerance on rates (default 1e-10)')
    common.add_argument('--output', choices=['json', 'text'], default='text')
    common.add_argument('--quiet', action='store_true')

    parser = argparse.ArgumentParser(prog='coupon-embed',
                                     description='Embedding analysis for multiple coupon collection.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('analyze', parents=[common], help='embeddability report')
    p.add_argument('spec')
    p.add_argument('--correlations', action='store_true')
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser('semigroup', parents=[common], help='p(t) table (CSV in text mode)')
    p.add_argument('spec')
    p.add_argument('--time', type=float, action='append')
    p.add_argument('--grid', help='t0..t1:steps')
    p.set_defaults(func=cmd_semigroup)

    p = sub.add_parser('simulate', parents=[common], help='Monte Carlo check')
    p.add_argument('spec')
    p.add_argument('--mode', choices=['discrete', 'continuous'], default='discrete')
    p.add_argument('--steps', type=int, default=1)
    p.add_argument('--horizon', type=float, default=1.0)
    p.add_argument('--trials', type=int, default=10 ** 5)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--trajectory', help='write one sample path as CSV')
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser('verify', parents=[common], help='run cross-checks')
    p.add_argument('spec', nargs='?')
    p.add_argument('--random', type=int, nargs=3, metavar=('N', 'COUNT', 'SEED'))
    p.add_argument('--level', choices=['quick', 'full'], default='quick')
    p.add_argument('--inject-fault', action='store_true',
                   help='perturb the generator matrix; the harness must report failure')
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, SpecError) as exc:
        sys.stderr.write('error: %s\n' % exc)
        return EXIT_INPUT
    except CouponEmbedError as exc:
        sys.stderr.write('error: %s\n' % exc)
        return EXIT_INPUT


if __name__ == '__main__':
    sys.exit(main())
