"""Numerical toolkit for Gaussian perimeter minimizers and the stability of shrinkers."""

from .measure import CylinderSpec, GaussianConvention, gsa_cylinder, gauss_volume_cylinder

__all__ = ["CylinderSpec", "GaussianConvention", "gsa_cylinder", "gauss_volume_cylinder"]
__version__ = "0.1.0"
