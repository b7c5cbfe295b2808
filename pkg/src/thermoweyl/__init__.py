"""Thermal Weyl algebra, anyon correlators and a finite-mode fermion oracle."""

from .errors import ThermoWeylError
from .symplectic import ThermalParams, sigma, thermal_quadratic, weyl_expectation
from .testfn import (Box, Constant, Gaussian, PolyGaussian, Ramp, RampDiff, Step,
                     fourier, reflect, shift)
from .weyl import AutomorphismSpec, WeylElement, multiply, weyl

__all__ = [
    "AutomorphismSpec", "Box", "Constant", "Gaussian", "PolyGaussian", "Ramp",
    "RampDiff", "Step", "ThermalParams", "ThermoWeylError", "WeylElement",
    "fourier", "multiply", "reflect", "shift", "sigma", "thermal_quadratic",
    "weyl", "weyl_expectation",
]

__version__ = "0.1.0"
