"""Constructive approximants for the perturbed Serrin torsion problem on a disk."""

from .fourier import FourierField, ThetaField
from .radial import RadialExpr, U0

__all__ = ["FourierField", "ThetaField", "RadialExpr", "U0"]
