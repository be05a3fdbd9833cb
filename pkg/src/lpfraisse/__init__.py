"""Finite-dimensional machinery of approximate isometric embeddings between l_p spaces.

Exact structured (disjoint-support) embeddings with rational weight data,
gap/Banach-Mazur geometry, Mazur-map transport, discrete measures with
p-characteristic transforms and inversion, box-partition envelopes,
equisurjection combinatorics with concentration certificates, spread-vector
approximation, and M-space lattice rounding.
"""

from lpfraisse.core import PIndex, FLOAT_TOL

__all__ = ["PIndex", "FLOAT_TOL"]
__version__ = "0.1.0"
