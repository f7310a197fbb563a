"""Cancelable fingerprint templates: ridge features, Cantor pairing, random projection."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
