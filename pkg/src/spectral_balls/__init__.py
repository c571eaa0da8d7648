"""Principal Dirichlet eigenvalues of centrally symmetric convex bodies,
Brownian exit-time estimates, and numerical checks of eigenvalue
subadditivity under intersection."""
from . import geometry, spectral, stochastic, verifier
from .errors import *  # noqa: F401,F403
from .geometry import (Ellipsoid, Intersect, MinkowskiAverage, PBall, Scale, SymPolytope, Translate,
                       from_dict, gauge, support, to_dict)
from .oracle import EigenOracle, FDSettings, MCSettings
from .spectral import EigEstimate, extrapolated_eigenvalue, principal_eigenvalue_fd
from .stochastic import SurvivalCurve, kac_rate, simulate_survival
from .verdict import Status, Verdict

__version__ = "0.1.0"
