"""Numerical pluripotential theory: extremal functions, thinness at infinity, genus-zero families."""

from .asymptotics import capacity_slope, robin_constant, thinness_profile
from .extremal import degree_trend, extremal_value, green_grid
from .genus0 import condition_checks, growth_verify, theorem5_check
from .genus0 import from_json as family_from_json
from .regions import from_json as region_from_json
from .regions import sample

__version__ = "0.1.0"

__all__ = [
    "capacity_slope", "condition_checks", "degree_trend", "extremal_value", "family_from_json",
    "green_grid", "growth_verify", "region_from_json", "robin_constant", "sample",
    "theorem5_check", "thinness_profile",
]
