"""
Unit and regression tests for the icevertex.cli module.
"""

import json
import os

import pytest

import icevertex
import icevertex.cli as cli

from icevertex.cli import EXIT_CHECK_FAILED, EXIT_DOMAIN, EXIT_IO, EXIT_OK, EXIT_POLE, RunConfig, build_parser, main
from icevertex.errors import InconsistentMatrix

PARAMS_FILE = os.path.dirname(icevertex.__file__) + '/data/params_n2_m1.json'


def test_run_config():
    """ Unit test for the RunConfig class."""

    args = build_parser().parse_args(['verify', '--check', 'ybe', '--tol', 'ybe=1e-6', '--n', '2'])
    config = RunConfig.from_args(args)

    assert config.command == 'verify'
    assert config.checks == ('ybe',)
    assert config.tolerances == {'ybe': 1e-6}
    assert (config.n, config.m) == (2, None)

    config = RunConfig.from_args(build_parser().parse_args(['verify']))
    assert config.checks == ('all',)


def test_enumerate(capsys):
    """ States are written as JSON lines and the count goes to standard error."""

    assert main(['enumerate', '--n', '1', '--m', '1']) == EXIT_OK

    out, err = capsys.readouterr()
    records = [json.loads(line) for line in out.splitlines()]
    assert records == [{'id': 0, 'state': '+\nC\nB\n'}, {'id': 1, 'state': '-\nB\nc\n'}]
    assert json.loads(err.splitlines()[-1])['count'] == 2


def test_enumerate_asm(tmp_path, capsys):
    """ Matrices can be written to a file."""

    outfile = tmp_path / 'asm.jsonl'

    assert main(['enumerate', '--kind', 'asm', '--n', '2', '--m', '1', '--out', str(outfile)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)['count'] == 4
    records = [json.loads(line) for line in outfile.read_text().splitlines()]
    assert [record['id'] for record in records] == [0, 1, 2, 3]


@pytest.mark.parametrize('argv', [
    ['enumerate', '--n', '1', '--m', '2'],
    ['enumerate', '--n', '6'],
    ['count', '--n', '5', '--method', 'brute'],
    ['count', '--n', '2', '--m', '1', '--k', '3', '--method', 'brute'],
    ['count', '--n', '2', '--m', '1', '--k', '3'],
])
def test_domain_errors(argv):
    """ Invalid sizes and guard rails exit with code 2."""

    assert main(argv) == EXIT_DOMAIN


def test_partition_seeded(capsys):
    """ Without a parameter file a seeded generic draw is used."""

    assert main(['partition', '--n', '2', '--m', '1', '--seed', '3']) == EXIT_OK

    result = json.loads(capsys.readouterr().out)
    assert result['relDiff'] < 1e-9
    assert result['cond'] >= 1.


def test_partition_no_columns(capsys):
    """ A single creation turn gives the same value both ways up to rounding."""

    assert main(['partition', '--n', '1', '--m', '0', '--seed', '12']) == EXIT_OK
    assert json.loads(capsys.readouterr().out)['relDiff'] < 1e-15


def test_partition_params_file(capsys):
    """ The brute-force sum and the determinant agree on the shipped parameters."""

    assert main(['partition', '--params', PARAMS_FILE]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)['relDiff'] < 1e-9

    assert main(['partition', '--params', PARAMS_FILE, '--method', 'det', '--format', 'text']) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith('det = ')
    assert 'brute' not in out


def test_partition_errors(tmp_path):
    """ Missing files exit with 3 and poles with 4."""

    assert main(['partition', '--params', str(tmp_path / 'missing.json')]) == EXIT_IO

    params_file = tmp_path / 'pole.json'
    params_file.write_text(json.dumps({'gamma': [0.3, 0.7], 'zeta': 0.2, 'phi': 1.,
                                       'lambda': [0.1, [0.2, 0.4]], 'mu': [0.5, 0.5]}))
    assert main(['partition', '--params', str(params_file), '--method', 'det']) == EXIT_POLE


def test_partition_non_finite(tmp_path):
    """ Overflowing weights exit with 4 instead of a traceback."""

    params_file = tmp_path / 'overflow.json'
    params_file.write_text(json.dumps({'gamma': [0.3, 0.7], 'zeta': 0.2, 'phi': 1., 'lambda': [[400, 0.1]], 'mu': []}))

    assert main(['partition', '--params', str(params_file), '--method', 'brute']) == EXIT_POLE


def test_library_error_fallback(monkeypatch):
    """ Library errors without a dedicated code exit with 2."""

    def fail(size):
        raise InconsistentMatrix('reconstructed state does not map back to the matrix')

    monkeypatch.setattr(cli, 'enumerate_matrices', fail)

    assert main(['enumerate', '--kind', 'asm', '--n', '1', '--m', '1']) == EXIT_DOMAIN


def test_count(capsys):
    """ Counts are printed as decimal strings."""

    assert main(['count', '--n', '1', '--m', '1']) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == {'n': 1, 'm': 1, 'N': ['1', '1'], 'total': '2'}

    assert main(['count', '--n', '2', '--m', '1', '--method', 'hypersum', '--k', '1']) == EXIT_OK
    assert json.loads(capsys.readouterr().out)['N'] == '2'

    assert main(['count', '--n', '2', '--m', '1', '--format', 'csv']) == EXIT_OK
    assert capsys.readouterr().out == 'n,m,k,N\n2,1,0,2\n2,1,1,2\n'


def test_count_methods_agree(capsys):
    """ Both exact formulas print the same report."""

    main(['count', '--n', '6', '--m', '3'])
    wilson = capsys.readouterr().out
    main(['count', '--n', '6', '--m', '3', '--method', 'hypersum'])

    assert capsys.readouterr().out == wilson


def test_count_plot(tmp_path):
    """ The --plot option saves a bar chart."""

    outfile = tmp_path / 'counts.png'

    assert main(['count', '--n', '3', '--m', '2', '--plot', str(outfile)]) == EXIT_OK
    assert outfile.exists()


def test_verify(capsys):
    """ Passing checks exit with 0 and report every check."""

    assert main(['verify', '--check', 'ybe', '--check', 'bijection', '--n', '2', '--seed', '7']) == EXIT_OK

    result = json.loads(capsys.readouterr().out)
    assert result['pass']
    assert result['seed'] == 7
    assert [check['name'] for check in result['checks']] == ['bijection', 'ybe']
    assert result['checks'][1]['maxResidual'] < 1e-12


def test_verify_specialization(capsys):
    """ The count prediction matches the restricted sums on one size."""

    assert main(['verify', '--check', 'specialization', '--n', '2', '--m', '1']) == EXIT_OK

    result = json.loads(capsys.readouterr().out)
    assert result['checks'][0]['draws'] == 2


def test_verify_failure(capsys):
    """ A failing check exits with 1."""

    argv = ['verify', '--check', 'limit', '--n', '2', '--draws', '2', '--tol', 'limit=1e-300']

    assert main(argv) == EXIT_CHECK_FAILED
    assert not json.loads(capsys.readouterr().out)['pass']


@pytest.mark.parametrize('value', ['ybe=abc', 'ybe', 'ybe=-1'])
def test_verify_bad_tolerance(value):
    """ Malformed --tol values are rejected by the parser."""

    with pytest.raises(SystemExit) as excinfo:
        main(['verify', '--tol', value])

    assert excinfo.value.code == 2
