"""Exterior algebra, G2 and SU(3) structures, and geometries with parallel skew torsion."""
from __future__ import annotations

from .classify import OUTSIDE, ClassificationReport, classify, classify6
from .exterior import Multivector, contract, derive, hodge, inner, wedge
from .g2 import PHI_STD, PHI_X_CONSTANT, is_g2
from .su3 import OMEGA_STD, PSI_STD, su3_normalize
from .torsion import HomogeneousModel
from .zoo import PointModel, build_case, build_zoo

__all__ = [
    "OUTSIDE",
    "ClassificationReport",
    "classify",
    "classify6",
    "Multivector",
    "contract",
    "derive",
    "hodge",
    "inner",
    "wedge",
    "PHI_STD",
    "PHI_X_CONSTANT",
    "is_g2",
    "OMEGA_STD",
    "PSI_STD",
    "su3_normalize",
    "HomogeneousModel",
    "PointModel",
    "build_case",
    "build_zoo",
]
