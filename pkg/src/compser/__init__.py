"""Numerical laboratory for complementary series representations of SO(d+1,1).

Submodules
----------
liealg       weights, branching, dimensions and Casimir scalars
group        matrix group, Iwasawa decomposition, quadrature on K and M
model        truncated L^2(K:upsilon) vectors and the action U^s(g)
harmonic     T-operators, c-function, Eisenstein check, intertwining scalars
asymptotics  matrix coefficients along a_t and decay certification
rates        mixing-exponent arithmetic
cli          the ``compser-lab`` command line driver
"""
from .liealg import CompSerLabel, make_label
from .model import ModelVector
from .rates import SpectralData

__all__ = ["CompSerLabel", "ModelVector", "SpectralData", "make_label"]
__version__ = "0.1.0"
