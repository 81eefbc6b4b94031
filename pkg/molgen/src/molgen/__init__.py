"""FCIDUMP fixture generator: built-in STO-3G RHF/UHF engine plus
frozen-core folding and geometry specs for the studied molecules."""

from .generate import GeometrySpec, generate, generate_to_directory, standard_specs
from .scf import run_rhf, run_scf, run_uhf

__all__ = [
    "GeometrySpec",
    "generate",
    "generate_to_directory",
    "standard_specs",
    "run_rhf",
    "run_scf",
    "run_uhf",
]
