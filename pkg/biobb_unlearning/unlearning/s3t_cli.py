#!/usr/bin/env python3

"""Module containing the s3t command line dispatcher over the unlearning building blocks."""
from pathlib import Path
from tempfile import TemporaryDirectory
from typing import Optional, Sequence
import argparse
import sys
from biobb_unlearning.s3t.core import UnlearningError
from biobb_unlearning.s3t.selection import DEFAULT_HORIZON, METHODS
from biobb_unlearning.s3t.engine import FAILURE_PREDICATES, MODES, PLAN_SOURCES
from biobb_unlearning.s3t.montecarlo import DEFAULT_TRIALS, GRANULARITIES, PRIOR_SPECS
from biobb_unlearning.unlearning.apply_deletions import apply_deletions
from biobb_unlearning.unlearning.compare_systems import COMPARE_COLUMNS, compare_systems
from biobb_unlearning.unlearning.deletion_bounds import BOUND_COLUMNS, deletion_bounds
from biobb_unlearning.unlearning.init_system import init_system
from biobb_unlearning.unlearning.partition_dataset import partition_dataset
from biobb_unlearning.unlearning.replay_log import replay_log
from biobb_unlearning.unlearning.retention_table import RETENTION_COLUMNS, retention_table
from biobb_unlearning.unlearning.score_sequences import SCORE_COLUMNS, score_sequences
from biobb_unlearning.unlearning.select_sequences import PLAN_COLUMNS, select_sequences
from biobb_unlearning.unlearning.simulate_deletions import RATE_COLUMNS, simulate_deletions

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageErrorParser(argparse.ArgumentParser):
    """Argument parser exiting with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '%s: error: %s\n' % (self.prog, message))


def _columns(columns: Sequence[str]) -> str:
    return 'CSV columns: ' + ', '.join(columns)


def _output(parser: argparse.ArgumentParser, default_name: str, formats: bool = True) -> None:
    parser.add_argument('--out', help='Output file. Written to standard output when omitted (%s).' % default_name)
    if formats:
        parser.add_argument('--format', choices=['csv', 'json'], help='Output format, taken from the --out extension when omitted.')


def build_parser() -> argparse.ArgumentParser:
    parser = UsageErrorParser(prog='s3t', description='Sharded, sliced and sequence-trained exact unlearning: sequence selection, closed-form bounds, Monte Carlo simulation and deletion-log replay.')
    parser.add_argument('--log-path', help='Directory for the out/err logs of the building blocks (a temporary directory by default).')
    sub = parser.add_subparsers(dest='command', required=True, parser_class=UsageErrorParser)

    p = sub.add_parser('select', help='Select B slice sequences per shard.', epilog=_columns(PLAN_COLUMNS))
    p.add_argument('--L', type=int, required=True)
    p.add_argument('--B', type=int, required=True)
    p.add_argument('--method', choices=METHODS, default='cyclic')
    p.add_argument('--prior', help='Deletion prior JSON file (required by bms, conditional and sorted-cyclic).')
    p.add_argument('--t', type=int, default=DEFAULT_HORIZON)
    p.add_argument('--seed', type=int, default=0)
    _output(p, 'plan.json')

    p = sub.add_parser('score', help='Score the sequences of a plan.', epilog=_columns(SCORE_COLUMNS))
    p.add_argument('--plan', required=True)
    p.add_argument('--prior')
    p.add_argument('--t', type=int, default=DEFAULT_HORIZON)
    _output(p, 'scores.csv')

    p = sub.add_parser('bounds', help='Closed-form deletion rates.', epilog=_columns(BOUND_COLUMNS))
    p.add_argument('--m', type=int, required=True)
    p.add_argument('--L', type=int, required=True)
    p.add_argument('--B', type=int, nargs='+', required=True)
    _output(p, 'bounds.csv')

    p = sub.add_parser('retention', help='Closed-form retention probabilities.', epilog=_columns(RETENTION_COLUMNS))
    p.add_argument('--L', type=int, required=True)
    p.add_argument('--B', type=int, required=True)
    p.add_argument('--k', type=int, nargs='+', required=True)
    p.add_argument('--r', type=int, nargs='+', required=True)
    _output(p, 'retention.csv')

    p = sub.add_parser('simulate', help='Monte Carlo deletion rates or retention.', epilog=_columns(RATE_COLUMNS))
    p.add_argument('--config', help='JSON trial configuration (field names as the flags).')
    p.add_argument('--prior', help='Explicit deletion prior JSON file.')
    p.add_argument('--analysis', choices=['deletion_rate', 'retention'], default='deletion_rate')
    p.add_argument('--m', type=int)
    p.add_argument('--L', type=int)
    p.add_argument('--B', type=int, nargs='+')
    p.add_argument('--mode', choices=MODES)
    p.add_argument('--plan-source', dest='plan_source', choices=[s for s in PLAN_SOURCES if s != 'explicit'])
    p.add_argument('--prior-spec', dest='prior_spec', choices=PRIOR_SPECS)
    p.add_argument('--alpha', type=float)
    p.add_argument('--granularity', choices=GRANULARITIES)
    p.add_argument('--n-items', dest='n_items', type=int)
    p.add_argument('--failure', choices=FAILURE_PREDICATES)
    p.add_argument('--trials', type=int, help='Number of trials (default %d).' % DEFAULT_TRIALS)
    p.add_argument('--seed', type=int, help='Master seed (default 0).')
    p.add_argument('--t', type=int)
    p.add_argument('--jobs', type=int, default=1)
    p.add_argument('--k', type=int, nargs='+', default=[1])
    p.add_argument('--r', type=int, nargs='+', default=[1])
    _output(p, 'simulate.csv')

    p = sub.add_parser('compare', help='Compare the deletion rates of several configurations.', epilog=_columns(COMPARE_COLUMNS))
    p.add_argument('--config', required=True, help='JSON list of trial configurations; the first is the baseline.')
    p.add_argument('--trials', type=int)
    p.add_argument('--seed', type=int)
    p.add_argument('--jobs', type=int, default=1)
    _output(p, 'compare.csv')

    p = sub.add_parser('replay', help='Replay a deletion log on a snapshot and verify the result.')
    p.add_argument('--snapshot', required=True)
    p.add_argument('--log', required=True)
    p.add_argument('--reference', help='Snapshot of the directly computed state.')
    p.add_argument('--final', help='Write the replayed state to this snapshot.')
    _output(p, 'replay_report.json', formats=False)

    p = sub.add_parser('partition', help='Split item ids into shards and slices.')
    p.add_argument('--n-items', dest='n_items', type=int, required=True)
    p.add_argument('--m', type=int, required=True)
    p.add_argument('--L', type=int, required=True)
    p.add_argument('--policy', choices=['round-robin', 'seeded-uniform'], default='round-robin')
    p.add_argument('--seed', type=int, default=0)
    _output(p, 'manifest.json', formats=False)

    p = sub.add_parser('init', help='Create the initial snapshot of an ensemble.')
    p.add_argument('--m', type=int, required=True)
    p.add_argument('--L', type=int, required=True)
    p.add_argument('--B', type=int, required=True)
    p.add_argument('--mode', choices=MODES, default='s3t')
    p.add_argument('--plan-source', dest='plan_source', choices=PLAN_SOURCES, default='cyclic')
    p.add_argument('--prior')
    p.add_argument('--plan')
    p.add_argument('--manifest')
    p.add_argument('--t', type=int, default=DEFAULT_HORIZON)
    p.add_argument('--failure', choices=FAILURE_PREDICATES, default='all-shards')
    p.add_argument('--seed', type=int, default=0)
    _output(p, 'init.s3t.json', formats=False)

    p = sub.add_parser('delete', help='Apply deletion requests to a snapshot and log them.')
    p.add_argument('--snapshot', required=True)
    p.add_argument('--targets', required=True)
    p.add_argument('--log', required=True, help='Event log written for the applied requests.')
    p.add_argument('--stop-on-failure', dest='stop_on_failure', action='store_true')
    _output(p, 'final.s3t.json', formats=False)
    return parser


def _props(args: argparse.Namespace, *names: str) -> dict:
    values = {name: getattr(args, name) for name in names if getattr(args, name, None) is not None}
    if getattr(args, 'format', None):
        values['output_format'] = args.format
    return values


def dispatch(args: argparse.Namespace, out: str, properties: dict) -> int:
    """Runs the building block of ``args.command`` writing to ``out``."""
    command = args.command
    if command == 'select':
        return select_sequences(output_plan_path=out, input_prior_path=args.prior,
                                properties={**properties, **_props(args, 'L', 'B', 'method', 't', 'seed')})
    if command == 'score':
        return score_sequences(input_plan_path=args.plan, output_scores_path=out, input_prior_path=args.prior,
                               properties={**properties, **_props(args, 't')})
    if command == 'bounds':
        return deletion_bounds(output_bounds_path=out, properties={**properties, **_props(args, 'm', 'L', 'B')})
    if command == 'retention':
        props = {**properties, **_props(args, 'L', 'B'), 'ks': args.k, 'rs': args.r}
        return retention_table(output_retention_path=out, properties=props)
    if command == 'simulate':
        props = {**properties, 'ks': args.k, 'rs': args.r,
                 **_props(args, 'analysis', 'm', 'L', 'B', 'mode', 'plan_source', 'prior_spec', 'alpha', 'granularity',
                          'n_items', 'failure', 'trials', 'seed', 't', 'jobs')}
        if args.config is None:
            props.setdefault('trials', DEFAULT_TRIALS)
            props.setdefault('seed', 0)
        return simulate_deletions(output_results_path=out, input_config_path=args.config,
                                  input_prior_path=args.prior, properties=props)
    if command == 'compare':
        return compare_systems(input_config_path=args.config, output_comparison_path=out,
                               properties={**properties, **_props(args, 'trials', 'seed', 'jobs')})
    if command == 'replay':
        return replay_log(input_snapshot_path=args.snapshot, input_log_path=args.log, output_report_path=out,
                          input_reference_path=args.reference, output_snapshot_path=args.final, properties=properties)
    if command == 'partition':
        return partition_dataset(output_manifest_path=out,
                                 properties={**properties, **_props(args, 'n_items', 'm', 'L', 'policy', 'seed')})
    if command == 'init':
        return init_system(output_snapshot_path=out, input_manifest_path=args.manifest, input_prior_path=args.prior,
                           input_plan_path=args.plan,
                           properties={**properties, **_props(args, 'm', 'L', 'B', 'mode', 'plan_source', 't', 'failure', 'seed')})
    return apply_deletions(input_snapshot_path=args.snapshot, input_targets_path=args.targets,
                           output_snapshot_path=out, output_log_path=args.log,
                           properties={**properties, **_props(args, 'stop_on_failure')})


def _default_name(args: argparse.Namespace) -> str:
    suffix = '.' + args.format if getattr(args, 'format', None) else ''
    names = {'select': 'plan.json', 'score': 'scores.csv', 'bounds': 'bounds.csv', 'retention': 'retention.csv',
             'simulate': 'simulate.csv', 'compare': 'compare.csv', 'replay': 'replay_report.json',
             'partition': 'manifest.json', 'init': 'init.s3t.json', 'delete': 'final.s3t.json'}
    name = names[args.command]
    return str(Path(name).with_suffix(suffix)) if suffix else name


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    with TemporaryDirectory(prefix='s3t_') as tmp_dir:
        properties = {'path': args.log_path or tmp_dir, 'sandbox_path': tmp_dir,
                      'can_write_console_log': args.out is not None}
        out = args.out or str(Path(tmp_dir).joinpath(_default_name(args)))
        try:
            code = dispatch(args, out, properties)
        except (UnlearningError, OSError, ValueError, KeyError) as err:
            print('s3t %s: error: %s' % (args.command, err), file=sys.stderr)
            return EXIT_DATA
        if args.out is None and Path(out).exists():
            sys.stdout.write(Path(out).read_text())
        if code:
            return EXIT_DATA
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == '__main__':
    run()
