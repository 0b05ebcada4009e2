"""Six-vertex model with domain-wall boundaries and a partially reflecting end:
states, determinant formulas for the partition function and exact state counts."""

# Add imports here
from .errors import *
from .utils import *
from .lattice import *
from .weights import *
from .detform import *
from .counting import *
from .asm import *
from .io import *

from ._version import __version__
