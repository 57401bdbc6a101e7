"""Constructive approximation by fixed-direction ReLU^k ridge expansions.

Library layout:

- sphere: point sets on S^d, mesh norm and separation diagnostics
- harmonics: Legendre polynomials, spherical harmonics, reference grids
- activation: ReLU^k spectrum, decay majorant, dot-product kernel
- quadrature: positive rules on scattered points, exact to a degree
- models: finite neuron models, constructive and least-squares fitting
- ball_map: cap/ball homogeneity transfer and parity extension
- pde_erm: Ritz-energy empirical risk minimization
- harness: rate sweeps, slope fits, CSV reports
- cli: the `fnspace` command
"""

from .activation import ActivationSpectrum, kernel, sigma_k, sigma_k_prime, spectrum, xi
from .ball_map import CapFunction, lift_S_k, parity_extend, restrict_T_k
from .errors import (
    ConfigurationError,
    ContractError,
    DomainError,
    NumericalError,
    PrecisionError,
)
from .harmonics import LegendreBasis, ReferenceGrid, harmonic_dim, reference_grid, sphere_area
from .harness import ExperimentConfig, RateReport, fit_slope, run_randcmp, run_rates
from .models import (
    FiniteNeuronModel,
    TargetFunction,
    coef_stat,
    constructive_fit,
    density_from_model,
    error_norms,
    least_squares_fit,
)
from .pde_erm import EllipticProblem, ErmResult, disk_problem, erm_fit, interval_problem
from .quadrature import QuadratureRule, build_rule, integrate
from .sphere import PointSet, generate_points, geodesic_distance, mesh_norm

__version__ = "0.1.0"
