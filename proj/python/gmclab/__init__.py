"""Gaussian multiplicative chaos and random welding laboratory.

Thin python layer over the C++ core: field sampling, chaos measures,
welding homeomorphisms, multifractal and capacity estimators, and the
verification suites.
"""

from ._gmclab import *  # noqa: F401,F403
from ._gmclab import __version__  # noqa: F401
