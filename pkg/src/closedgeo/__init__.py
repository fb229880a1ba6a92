"""Closed geodesics on the Bolza surface: enumeration, periods and statistics."""

from .enumerator import ClassTable, ConjClass, build_table, enumerate_ball, load_table, save_table
from .errors import GeodesicError
from .hyperbolic import PSL2Element, classify, norm_and_length, origin_distance
from .kernels import BACKEND
from .periods import HarmonicForm, SeriesValue, class_pairing, pairing
from .surface import SurfaceGroup, bolza, build_bolza_group

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ClassTable",
    "ConjClass",
    "GeodesicError",
    "HarmonicForm",
    "PSL2Element",
    "SeriesValue",
    "SurfaceGroup",
    "bolza",
    "build_bolza_group",
    "build_table",
    "class_pairing",
    "classify",
    "enumerate_ball",
    "load_table",
    "norm_and_length",
    "origin_distance",
    "pairing",
    "save_table",
]
