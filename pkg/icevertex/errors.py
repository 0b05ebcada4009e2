""" Exceptions and warnings. """

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


class IceVertexError(Exception):
    """ Base class of every error raised by icevertex. """


class SizeError(IceVertexError, ValueError):
    """ Raised for lattice sizes with m > n, n < 1 or beyond a guard rail. """


class DomainError(IceVertexError, ValueError):
    """ Raised for arguments outside the domain of an operation. """


class IceRuleViolation(IceVertexError):
    """ Raised when the arrows around a vertex do not obey the ice rule. """


class ForbiddenTurn(IceVertexError):
    """ Raised for the (Left, Left) arrow pair at the reflecting end. """


class ParseError(IceVertexError):
    """ Raised on malformed state, matrix or parameter text.

    Parameters
    ----------
    message : string
        Description of the problem.
    line : int
        1-based line of the offending character.
    column : int
        1-based column of the offending character.
    """

    def __init__(self, message, line=1, column=1):
        self.line = line
        self.column = column
        super().__init__(f'line {line}, column {column}: {message}')


class PoleError(IceVertexError, ZeroDivisionError):
    """ Raised when a denominator vanishes. The ``factor`` attribute names it. """

    def __init__(self, factor, where=None):
        self.factor = factor
        self.where = where
        message = f'vanishing factor {factor}'
        if where:
            message += f' at {where}'
        super().__init__(message)


class NonFiniteValue(IceVertexError, ArithmeticError):
    """ Raised when a NaN or an infinity would escape an operation. """


class NonIntegerResult(IceVertexError, ArithmeticError):
    """ Raised when an exact count does not evaluate to a non-negative integer. """

    def __init__(self, value, label=''):
        self.value = value
        super().__init__(f'{label} evaluated to {value}, expected a non-negative integer')


class InconsistentMatrix(IceVertexError):
    """ Raised when a matrix does not propagate to a valid lattice state. """


class QuadratureFailure(IceVertexError):
    """ Raised when a quadrature error estimate exceeds its tolerance. """


class SingularMatrixWarning(RuntimeWarning):
    """ Warning category for badly conditioned determinant evaluations. """
