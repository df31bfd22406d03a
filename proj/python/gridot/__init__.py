"""Grid-sketched exact W2^2 estimation between densities on the unit cube."""

from ._gridot import *  # noqa: F401,F403
from ._gridot import __doc__  # noqa: F401
