"""Hodge spectra, singular strata and heat invariants of flat orbifolds."""

from .heat import heat_report, heat_trace_check, singular_volume_from_spectrum
from .krawtchouk import krawtchouk, krawtchouk_zeros
from .lattice import Lattice
from .orbifold import FlatOrbifoldSpec, catalog, resolve, singular_strata
from .spectrum import EQUAL, compare_spectra, p_spectrum

__version__ = "0.1.0"

__all__ = [
    "EQUAL",
    "FlatOrbifoldSpec",
    "Lattice",
    "catalog",
    "compare_spectra",
    "heat_report",
    "heat_trace_check",
    "krawtchouk",
    "krawtchouk_zeros",
    "p_spectrum",
    "resolve",
    "singular_strata",
    "singular_volume_from_spectrum",
]
