"""Exact computation with the Markov and Lagrange spectra just above 3."""

from .errors import Markov3Error
from .exactnum import CertifiedReal, QuadraticSurd
from .words import lambda_bounds, markov_value_periodic
from .christoffel import AlphabetPair, sigma3_enumerate
from .spectra import enumerate_sigma, membership

__version__ = "0.1.0"

__all__ = [
    "Markov3Error",
    "CertifiedReal",
    "QuadraticSurd",
    "lambda_bounds",
    "markov_value_periodic",
    "AlphabetPair",
    "sigma3_enumerate",
    "enumerate_sigma",
    "membership",
]
