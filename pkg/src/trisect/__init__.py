"""Direct and inverse scattering for the third-order operator i D^3 + q on the half-line.

Modules:
    raygeom   cube roots of unity, rays, sectors and regions of the spectral plane
    trig3     generalized trigonometric functions s_0, s_1, s_2 and their zeros
    volterra  Jost and Cauchy-problem solutions through Volterra equations
    forward   expansion and scattering coefficients, bound states, sampled data
    riemann   canonical function, singular system on the rays, potential recovery
    cli       command-line entry point
"""
from .forward import BoundaryData, ScatteringData, sample_scattering_data, validate_scattering_data
from .volterra import SampledPotential, jost_solve, read_potential_csv

__version__ = "0.1.0"

__all__ = ["BoundaryData", "SampledPotential", "ScatteringData", "jost_solve", "read_potential_csv",
           "sample_scattering_data", "validate_scattering_data"]
