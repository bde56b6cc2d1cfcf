"""Riemannian min-max optimization toolkit.

Thin python surface over the C++ core: dense spectral analysis, embedded
manifolds (sphere / Stiefel / products), the example zero-sum games with
closed-form equilibria, tau-GDA / tau-SGA solvers with convergence
certificates, and the Gaussian orthogonal-WGAN experiment.
"""

from rminimax._core import *  # noqa: F401,F403
from rminimax._core import __version__  # noqa: F401
