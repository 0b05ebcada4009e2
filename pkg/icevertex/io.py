""" Reading and writing parameter files, state and matrix streams and count reports; plotting. """

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

import json

from io import StringIO

import numpy as np

import matplotlib.pyplot as plt

from icevertex.asm import AsmMatrix, parse_matrix
from icevertex.errors import DomainError, IceVertexError, ParseError
from icevertex.lattice import LatticeSize, parse_state, serialize_state
from icevertex.weights import ModelParams

FORMATS = ('json', 'csv', 'text')


def encode_complex(value):
    """ Complex numbers are stored as [re, im] pairs. """
    value = complex(value)
    return [value.real, value.imag]


def decode_complex(value, name):
    """ Reads a [re, im] pair or a plain real number. """
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(isinstance(part, (int, float)) for part in value):
        return complex(value[0], value[1])
    raise ParseError(f'{name} must be a number or a [re, im] pair, got {value!r}')


def params_to_dict(params):
    return {'n': params.size.n, 'm': params.size.m,
            'gamma': encode_complex(params.gamma), 'zeta': encode_complex(params.zeta),
            'phi': encode_complex(params.phi),
            'lambda': [encode_complex(lam) for lam in params.lambdas],
            'mu': [encode_complex(mu) for mu in params.mus]}


def params_from_dict(data):
    """
    Builds :obj:`ModelParams` from the dictionary of a parameter file.

    Spectral parameters are read from the 'lambda' (one per double row) and 'mu'
    (one per vertical line) lists; the optional 'n' and 'm' keys must agree with
    their lengths.
    """
    if not isinstance(data, dict):
        raise ParseError('parameter file must contain a JSON object')

    try:
        values = {name: decode_complex(data[name], name) for name in ('gamma', 'zeta', 'phi')}
        values['lambdas'] = tuple(decode_complex(value, 'lambda') for value in data['lambda'])
        values['mus'] = tuple(decode_complex(value, 'mu') for value in data.get('mu', []))
    except KeyError as err:
        raise ParseError(f'missing key {err.args[0]!r}') from None
    except TypeError as err:
        raise ParseError(f'malformed parameter list: {err}') from None

    params = ModelParams(**values)

    for key, expected in (('n', params.size.n), ('m', params.size.m)):
        if key in data and data[key] != expected:
            raise ParseError(f'{key}={data[key]} disagrees with the {expected} spectral parameters given')

    return params


def _load_json(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(err.msg, err.lineno, err.colno) from None


def load_params(params_filename):
    """ Reads a JSON parameter file.

    Parameters
    ----------
    params_filename : string
        Name of the JSON file.

    Returns
    -------
    params : :obj:`ModelParams`
    """
    with open(params_filename, encoding='utf-8') as params_file:
        return params_from_dict(_load_json(params_file.read()))


def save_params(params, params_filename):
    """ Writes ``params`` to a JSON parameter file. """
    with open(params_filename, 'w', encoding='utf-8') as params_file:
        json.dump(params_to_dict(params), params_file, indent=2)
        params_file.write('\n')


def state_record(index, state):
    """ Stream record of a state: its position in the enumeration and its text. """
    return {'id': index, 'state': serialize_state(state)}


def matrix_record(index, mat):
    return {'id': index, 'n': mat.size.n, 'm': mat.size.m, 'rows': [list(row) for row in mat.entries]}


def write_jsonl(records, outfile):
    """ Writes one compact JSON object per line and returns the number of lines. """
    count = 0
    for record in records:
        outfile.write(json.dumps(record, separators=(',', ':')) + '\n')
        count += 1
    return count


def _read_jsonl(filename, convert):
    items = []

    with open(filename, encoding='utf-8') as infile:
        for number, line in enumerate(infile, start=1):
            if not line.strip():
                continue
            record = _load_json(line)
            try:
                items.append(convert(record))
            except (KeyError, TypeError) as err:
                raise ParseError(f'malformed record: {err}', number, 1) from None
            except ParseError as err:
                raise ParseError(f'record {number}: {err}', number, 1) from None

    return items


def _check_id(record):
    index = record['id']
    if not isinstance(index, int) or isinstance(index, bool) or index < 0:
        raise ParseError(f'record id must be a non-negative integer, got {index!r}')


def _state_from_record(record):
    _check_id(record)
    state = parse_state(record['state'])
    # n and m are optional in state records
    for key, value in (('n', state.size.n), ('m', state.size.m)):
        if key in record and record[key] != value:
            raise ParseError(f'state of size {state.size} does not match {key}={record[key]}')
    return state


def _matrix_from_record(record):
    _check_id(record)
    try:
        return AsmMatrix(LatticeSize(record['n'], record['m']), record['rows'])
    except IceVertexError as err:
        raise ParseError(str(err)) from None


def read_states(filename):
    """ Reads a JSON-lines file of states written by :func:`write_jsonl`. """
    return _read_jsonl(filename, _state_from_record)


def read_matrices(filename):
    """ Reads a JSON-lines file of matrices written by :func:`write_jsonl`. """
    return _read_jsonl(filename, _matrix_from_record)


def load_matrix(filename):
    """ Reads a matrix in the plain text format. """
    with open(filename, encoding='utf-8') as infile:
        return parse_matrix(infile.read())


def format_count_report(report, fmt='json'):
    """ Renders a :obj:`CountReport` as JSON, as a CSV table of (n, m, k, N_k) or as text. """
    if fmt == 'json':
        return json.dumps(report.to_dict()) + '\n'

    if fmt == 'csv':
        table = np.array([[report.n, report.m, k, count] for k, count in enumerate(report.counts)], dtype=object)
        buffer = StringIO()
        np.savetxt(buffer, table, fmt='%s', delimiter=',', header='n,m,k,N', comments='')
        return buffer.getvalue()

    if fmt == 'text':
        lines = [f'n={report.n} m={report.m}']
        lines += [f'N_{k} = {count}' for k, count in enumerate(report.counts)]
        lines.append(f'total = {report.total}')
        return '\n'.join(lines) + '\n'

    raise DomainError(f'unknown format {fmt!r}, expected one of {FORMATS}')


def plot_counts(report, outfile, **plot_format):
    """ Plots the refined counts N_k of a :obj:`CountReport` as a bar chart.

    Parameters
    ----------
    report : :obj:`CountReport`
        Counts to plot.
    outfile : string
        Output filename.
    plot_format : dict
        Dictionary containing parameters for the figure format.
    """
    size = plot_format.get('size', (8., 6.))
    color = plot_format.get('color', 'tab:blue')
    logscale = plot_format.get('logscale', False)

    ks = np.arange(report.m + 1)
    counts = np.array([float(count) for count in report.counts])

    plt.figure(figsize=size)

    plt.xlabel(r'$k$ (number of $k_+$ turns)')
    plt.ylabel(r'$N_k$')
    plt.title(f'n={report.n}, m={report.m}, total={report.total}')

    plt.bar(ks, counts, color=color)
    plt.xticks(ks)

    if logscale:
        plt.yscale('log')

    plt.tight_layout()
    plt.savefig(outfile)
    plt.close()
