"""Dirty-paper coding rates, outage and broadcast regions under fading known only at the receiver."""

__version__ = "0.1.0"

from .broadcast import *  # noqa: F401,F403
from .broadcast import __all__ as _broadcast_all
from .ergodic import *  # noqa: F401,F403
from .ergodic import __all__ as _ergodic_all
from .errors import (
    DivergenceError,
    DomainError,
    DpcError,
    ModelFileError,
    RegionSizeError,
    UnsupportedOperationError,
)
from .expectation import *  # noqa: F401,F403
from .expectation import __all__ as _expectation_all
from .fading import *  # noqa: F401,F403
from .fading import __all__ as _fading_all
from .quasistatic import *  # noqa: F401,F403
from .quasistatic import __all__ as _quasistatic_all

__all__ = sorted(
    set(_broadcast_all + _ergodic_all + _expectation_all + _fading_all + _quasistatic_all)
    | {
        "DivergenceError",
        "DomainError",
        "DpcError",
        "ModelFileError",
        "RegionSizeError",
        "UnsupportedOperationError",
    }
)
