"""cubex: finite checks of higher extensions, resolutions and the Kan property."""

from cubex.classes import ExtensionClass, extension_class
from cubex.config import Caps, load_caps
from cubex.dsl import parse, serialize
from cubex.types import Cube, FinMorphism, FinObject, SquareArrow, TheoremReport, TruncatedSimplicial

__all__ = [
    "Caps",
    "Cube",
    "ExtensionClass",
    "FinMorphism",
    "FinObject",
    "SquareArrow",
    "TheoremReport",
    "TruncatedSimplicial",
    "extension_class",
    "load_caps",
    "parse",
    "serialize",
]
