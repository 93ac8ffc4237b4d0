"""Capacity regimes of two-user MIMO Gaussian interference channels.

Decide which closed-form capacity regime an instance falls in, build the
matrices that certify it, and evaluate the capacity region or sum capacity.
"""

__version__ = "0.1.0"

from .channel import ChannelInstance, load_instance, read_instance, serialize  # noqa: E402
from .errors import DomainError, ICapError, InputError  # noqa: E402
from .matlib import BACKEND, DEFAULT_TOL, ToleranceConfig  # noqa: E402
from .regimes import Regime, classify  # noqa: E402

__all__ = [
    "BACKEND",
    "ChannelInstance",
    "DEFAULT_TOL",
    "DomainError",
    "ICapError",
    "InputError",
    "Regime",
    "ToleranceConfig",
    "classify",
    "load_instance",
    "read_instance",
    "serialize",
    "__version__",
]
