"""One-dimensional periodic spectral laboratory."""
from .grid import Grid, GridFunction, propagate
from .quadrature import SimplexQuadrature
