"""Pseudo-spectral time-integration lab for the stochastic 2D Navier-Stokes
equations on the periodic torus: Fourier-space operators, Q-Wiener sampling,
splitting / implicit Euler schemes, rate constants and Monte Carlo
strong-error studies."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
