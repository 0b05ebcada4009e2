""" Command-line interface. """

# MIT License

# Copyright (c) 2022-2023 Luis Gálvez

# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.

# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.

import argparse
import json
import logging
import sys
import time

from dataclasses import dataclass, field

from icevertex import io
from icevertex.asm import enumerate_matrices
from icevertex.counting import METHODS, count_Nk, count_Nk_hypersum, count_total
from icevertex.detform import det_partition
from icevertex.errors import DomainError, IceVertexError, NonFiniteValue, NonIntegerResult, ParseError, PoleError
from icevertex.errors import SizeError
from icevertex.lattice import LatticeSize, enumerate_states_sharded
from icevertex.utils import relative_difference, rng_stream
from icevertex.verify import CHECKS, SuiteSettings, run_checks
from icevertex.weights import partition_brute, sample_params

from ._version import __version__

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_DOMAIN = 2
EXIT_IO = 3
EXIT_POLE = 4
EXIT_INTEGRALITY = 5

# Largest n accepted by the enumerating commands unless --max-n says otherwise
ENUMERATION_MAX_N = 5
BRUTE_COUNT_MAX_N = 4


@dataclass(frozen=True)
class RunConfig:
    """ Everything a command needs, collected from the command line. """
    command: str
    n: int = 1
    m: int = 0
    k: int = None
    kind: str = 'state'
    method: str = None
    params_file: str = None
    seed: int = 0
    checks: tuple = ()
    tolerances: dict = field(default_factory=dict)
    output: str = 'json'
    out_path: str = None
    max_n: int = None
    draws: int = 20
    plot: str = None

    @property
    def size(self):
        return LatticeSize(self.n, self.m)

    @classmethod
    def from_args(cls, args):
        values = {name: getattr(args, name) for name in cls.__dataclass_fields__ if hasattr(args, name)}
        values['command'] = args.command
        if 'tolerances' in values:
            values['tolerances'] = dict(values['tolerances'] or [])
        if 'checks' in values:
            values['checks'] = tuple(values['checks'] or ['all'])
        return cls(**values)


def _tolerance(text):
    """ Parses NAME=VAL with VAL a positive float. """
    name, separator, value = text.partition('=')
    try:
        tolerance = float(value)
    except ValueError:
        tolerance = float('nan')
    if not separator or not tolerance > 0:
        raise argparse.ArgumentTypeError(f'expected NAME=VAL with a positive VAL, got {text!r}')
    return name, tolerance


def _emit(text, config):
    if config.out_path:
        with open(config.out_path, 'w', encoding='utf-8') as outfile:
            outfile.write(text)
    else:
        sys.stdout.write(text)


def cmd_enumerate(config):
    """ Writes every state (or matrix) of a size as JSON lines and reports the count. """
    size = config.size
    max_n = ENUMERATION_MAX_N if config.max_n is None else config.max_n
    if size.n > max_n:
        raise SizeError(f'n={size.n} exceeds the enumeration limit {max_n}; raise it with --max-n')

    start = time.perf_counter()
    if config.kind == 'asm':
        records = (io.matrix_record(index, mat) for index, mat in enumerate(enumerate_matrices(size)))
    else:
        records = (io.state_record(index, state) for index, state in enumerate(enumerate_states_sharded(size)))

    if config.out_path:
        with open(config.out_path, 'w', encoding='utf-8') as outfile:
            count = io.write_jsonl(records, outfile)
        summary_stream = sys.stdout
    else:
        count = io.write_jsonl(records, sys.stdout)
        summary_stream = sys.stderr

    summary = {'count': count, 'elapsed': round(time.perf_counter() - start, 6)}
    summary_stream.write(json.dumps(summary) + '\n')

    return EXIT_OK


def cmd_partition(config):
    """ Evaluates the partition function by summing states, with the determinant, or both. """
    if config.params_file:
        params = io.load_params(config.params_file)
    else:
        params = sample_params(config.size, rng_stream(config.seed, 'partition'))
        logger.info('drew parameters for %s from seed %d', params.size, config.seed)

    method = config.method or 'both'
    if method not in ('brute', 'det', 'both'):
        raise DomainError(f'unknown partition method {method!r}')

    result = {}
    if method in ('brute', 'both'):
        result['brute'] = io.encode_complex(partition_brute(params))
    if method in ('det', 'both'):
        report = det_partition(params)
        result['det'] = io.encode_complex(report.value)
        result['cond'] = report.condition_estimate
    if method == 'both':
        result['relDiff'] = relative_difference(complex(*result['brute']), complex(*result['det']))

    if config.output == 'text':
        text = ''.join(f'{key} = {value}\n' for key, value in result.items())
    else:
        text = json.dumps(result) + '\n'
    _emit(text, config)

    return EXIT_OK


def cmd_count(config):
    """ Prints the refined state counts N_k of a size. """
    size = config.size
    method = config.method or 'wilson'
    if method not in METHODS:
        raise DomainError(f'unknown counting method {method!r}, expected one of {METHODS}')

    max_n = BRUTE_COUNT_MAX_N if config.max_n is None else config.max_n
    if method == 'brute' and size.n > max_n:
        raise SizeError(f'brute-force counting is limited to n <= {max_n}; raise it with --max-n')

    if config.k is not None and method != 'brute':
        count = (count_Nk if method == 'wilson' else count_Nk_hypersum)(size.n, size.m, config.k)
        _emit(json.dumps({'n': size.n, 'm': size.m, 'k': config.k, 'N': str(count)}) + '\n', config)
        return EXIT_OK

    report = count_total(size.n, size.m, method)
    if config.k is not None:
        if not 0 <= config.k <= size.m:
            raise DomainError(f'k={config.k} outside 0..{size.m}')
        _emit(json.dumps({'n': size.n, 'm': size.m, 'k': config.k, 'N': str(report.counts[config.k])}) + '\n',
              config)
    else:
        _emit(io.format_count_report(report, config.output), config)

    if config.plot:
        io.plot_counts(report, config.plot)

    return EXIT_OK


def cmd_verify(config):
    """ Runs named checks and writes one JSON record per check; fails if any check fails. """
    names = sorted(CHECKS) if 'all' in config.checks else list(config.checks)
    for name in names:
        if name not in CHECKS:
            raise DomainError(f'unknown check {name!r}, expected one of {sorted(CHECKS)} or all')

    settings = SuiteSettings(seed=config.seed, n=config.n, m=config.m, draws=config.draws)
    reports = run_checks(names, settings, config.tolerances)
    passed = all(report.passed for report in reports)

    if config.output == 'text':
        lines = [f'{r.name:15s} draws={r.draws:4d} max={r.max_residual:.3e} tol={r.tolerance:.1e} '
                 f'{"pass" if r.passed else "FAIL"}' for r in reports]
        text = '\n'.join(lines) + '\n'
    else:
        text = json.dumps({'seed': config.seed, 'checks': [r.to_dict() for r in reports], 'pass': passed},
                          indent=2) + '\n'
    _emit(text, config)

    return EXIT_OK if passed else EXIT_CHECK_FAILED


COMMANDS = {'enumerate': cmd_enumerate, 'partition': cmd_partition, 'count': cmd_count, 'verify': cmd_verify}


def build_parser():
    """ Command-line parser with one subcommand per operation. """
    description = 'IceVertex: states, partition functions and exact counts of the six-vertex model' +\
                  ' with domain-wall boundaries and a partially reflecting end.'

    parser = argparse.ArgumentParser(prog='icevertex', description=description)
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='Increase logging verbosity (repeatable)')
    parser.add_argument('-q', '--quiet', action='store_true', help='Only log errors')

    subparsers = parser.add_subparsers(dest='command', required=True)

    def add_size(subparser, n_default=1, m_default=0):
        subparser.add_argument('--n', type=int, default=n_default,
                               help=f'Number of double rows (default: {n_default})')
        subparser.add_argument('--m', type=int, default=m_default,
                               help=f'Number of vertical lines (default: {m_default})')

    def add_output(subparser, choices=io.FORMATS):
        subparser.add_argument('--format', dest='output', choices=choices, default='json',
                               help='Output format (default: json)')
        subparser.add_argument('--out', dest='out_path', help='Output filename (default: standard output)')

    enumerate_parser = subparsers.add_parser('enumerate', help='Write every state or matrix as JSON lines')
    add_size(enumerate_parser)
    enumerate_parser.add_argument('--kind', choices=('state', 'asm'), default='state',
                                  help='Enumerate lattice states or matrices (default: state)')
    enumerate_parser.add_argument('--max-n', type=int, help=f'Size guard (default: {ENUMERATION_MAX_N})')
    enumerate_parser.add_argument('--out', dest='out_path', help='Output filename (default: standard output)')

    partition_parser = subparsers.add_parser('partition', help='Evaluate the partition function')
    add_size(partition_parser)
    partition_parser.add_argument('--params', dest='params_file',
                                  help='JSON parameter file (default: a generic draw from --seed)')
    partition_parser.add_argument('--method', choices=('brute', 'det', 'both'), default='both',
                                  help='Evaluation method (default: both)')
    partition_parser.add_argument('--seed', type=int, default=0, help='Seed of the parameter draw (default: 0)')
    add_output(partition_parser, ('json', 'text'))

    count_parser = subparsers.add_parser('count', help='Count the states exactly')
    add_size(count_parser)
    count_parser.add_argument('--k', type=int, help='Only report N_k')
    count_parser.add_argument('--method', choices=METHODS, default='wilson', help='Counting method (default: wilson)')
    count_parser.add_argument('--max-n', type=int, help=f'Size guard of --method brute (default: {BRUTE_COUNT_MAX_N})')
    count_parser.add_argument('--plot', help='Save a bar chart of N_k to this file')
    add_output(count_parser)

    verify_parser = subparsers.add_parser('verify', help='Run the verification suite')
    verify_parser.add_argument('--check', dest='checks', action='append', choices=sorted(CHECKS) + ['all'],
                               help='Check to run, repeatable (default: all)')
    verify_parser.add_argument('--tol', dest='tolerances', action='append', type=_tolerance,
                               help='Tolerance override NAME=VAL, repeatable')
    verify_parser.add_argument('--seed', type=int, default=0, help='Master seed (default: 0)')
    verify_parser.add_argument('--n', type=int, default=3, help='Largest number of double rows (default: 3)')
    verify_parser.add_argument('--m', type=int, help='Restrict to this number of vertical lines')
    verify_parser.add_argument('--draws', type=int, default=20, help='Random draws per size (default: 20)')
    add_output(verify_parser, ('json', 'text'))

    return parser


def _configure_logging(verbose, quiet):
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING

    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)


def main(argv=None):
    """ Command-line interface """
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose, args.quiet)

    try:
        config = RunConfig.from_args(args)
        return COMMANDS[config.command](config)
    except (SizeError, DomainError) as err:
        logger.error('%s', err)
        return EXIT_DOMAIN
    except (ParseError, OSError) as err:
        logger.error('%s', err)
        return EXIT_IO
    except (PoleError, NonFiniteValue) as err:
        logger.error('%s', err)
        return EXIT_POLE
    except NonIntegerResult as err:
        logger.error('%s', err)
        return EXIT_INTEGRALITY
    except IceVertexError as err:
        logger.error('%s: %s', type(err).__name__, err)
        return EXIT_DOMAIN


if __name__ == '__main__':
    sys.exit(main())
