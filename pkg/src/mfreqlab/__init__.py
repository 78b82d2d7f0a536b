"""mfreqlab: numerical laboratory for variable-coefficient multi-frequency
estimates and a circle-method decomposition of a discrete oscillatory
maximal operator."""

__version__ = "0.1.0"

from ._backend import NAME as backend  # noqa: E402,F401
