"""Mean-field tug-of-war model of bidirectional cargo transport and its 1D reduction."""

__version__ = "0.1.0"

from .params import MotorParams, TugOfWarConfig, load_config, symmetric_config, asymmetric_config  # noqa: E402
from .solver import StationaryState, classify_all, find_roots, scan_parameter  # noqa: E402

__all__ = [
    "MotorParams",
    "TugOfWarConfig",
    "StationaryState",
    "asymmetric_config",
    "classify_all",
    "find_roots",
    "load_config",
    "scan_parameter",
    "symmetric_config",
]
