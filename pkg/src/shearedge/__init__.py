"""Edge detection and classification via anisotropic directional transforms.

The package computes continuous shearlet-type coefficients of indicator
functions of 2D/3D regions with compactly supported separable generators,
fits their scale-decay exponents to detect and classify boundary
singularities (regular points, corners, separating curves), recovers
curvature from the decay limits, and provides frame/admissibility
diagnostics for the underlying transform.
"""

from .kernels import BACKEND

__all__ = ["BACKEND"]
__version__ = "0.1.0"
