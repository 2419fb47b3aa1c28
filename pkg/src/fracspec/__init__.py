"""Exact spectra, spectral bounds and semiclassical constants for the
Dirichlet operator ``sum_i (-d_i^2)^s`` on hypercubes."""
__version__ = "0.1.0"

from .errors import ConvergenceError, DomainError, IncompleteSpectrumError, ResourceLimitError
from .specfun import (
    ball_volume,
    lieb_thirring_classical_constant,
    riesz_classical_constant,
    sphere_volume,
)
from .spectrum import (
    EigenvalueRecord,
    SpectralParams,
    SpectrumSlice,
    counting_function,
    eigenvalue,
    eigenvalue_sum,
    enumerate_below,
    enumerate_smallest,
)
from .bounds import (
    DomainSpec,
    bly_sum_lower_bound,
    counting_upper_bound,
    polya_lower_bound,
    scan_bounds,
    weyl_constant,
)
from .smoothed import HeatQuery, RieszQuery, heat_trace, partition_function, riesz_mean
from .semiclassical import PhaseSpaceQuery, PotentialSpec, load_potential_grid, save_potential_grid
from .coherent import CoherentParams, kinetic_expectation, semiclassical_limit_check
