""" Utility functions. """

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

import hashlib
import math
import os

import numpy as np

from icevertex.errors import DomainError

THREADS_VARIABLE = 'ICEVERTEX_THREADS'


def fsum_complex(values):
    """
    Sums complex numbers with correctly rounded partial sums on each component.

    The result does not depend on the order of the terms, which makes sharded sums
    reproducible.

    Parameters
    ----------
    values : iterable of complex
        Terms to add.

    Returns
    -------
    total : complex
        The compensated sum.
    """
    values = [complex(value) for value in values]

    return complex(math.fsum(value.real for value in values),
                   math.fsum(value.imag for value in values))


def relative_difference(reference, other):
    """
    Calculates |reference - other| / |reference|, falling back to the absolute
    difference when the reference is exactly zero.
    """
    difference = abs(reference - other)
    scale = abs(reference)

    if scale == 0:
        return float(difference)

    return float(difference / scale)


def rng_stream(seed, label):
    """
    Creates an independent random generator for a labelled consumer.

    Parameters
    ----------
    seed : int
        64-bit unsigned master seed.
    label : string
        Name of the consumer, e.g. the name of a verification check.

    Returns
    -------
    rng : :obj:`numpy.random.Generator`
        PCG64 generator seeded from (seed, hash of label).
    """
    if seed < 0 or seed >= 2**64:
        raise DomainError(f'seed {seed} is not a 64-bit unsigned integer')

    digest = hashlib.sha256(label.encode('utf-8')).digest()
    entropy = [int(seed), int.from_bytes(digest[:8], 'little')]

    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def uniform_complex(rng, count):
    """ Draws complex numbers with real and imaginary parts uniform in [-1, 1]. """
    parts = rng.uniform(-1., 1., size=(count, 2))

    return [complex(re, im) for re, im in parts]


def richardson(values, ratio=2.):
    """
    Richardson extrapolation to step size zero.

    Parameters
    ----------
    values : sequence of complex
        Values computed at step sizes h, h/ratio, h/ratio**2, ...
    ratio : float
        Reduction factor between consecutive step sizes.

    Returns
    -------
    estimate : complex
        Extrapolated value with the error terms of order 1 to len(values)-1 removed.
    """
    table = list(values)

    for order in range(1, len(values)):
        factor = ratio**order
        table = [(factor * fine - coarse) / (factor - 1.) for coarse, fine in zip(table, table[1:])]

    return table[0]


def max_workers(default=1):
    """ Reads the worker cap from the ICEVERTEX_THREADS environment variable. """
    value = os.environ.get(THREADS_VARIABLE)

    if value is None or value.strip() == '':
        return default

    try:
        workers = int(value)
    except ValueError as err:
        raise DomainError(f'{THREADS_VARIABLE}={value!r} is not an integer') from err

    if workers < 1:
        raise DomainError(f'{THREADS_VARIABLE} must be positive, got {workers}')

    return workers
