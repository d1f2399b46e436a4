__version__ = "0.1.0a1"

from . import bs_core
from . import config
from . import errors
from . import expansion
from . import mc_oracle
from . import model
from . import quadrature
from .bs_core import BsQuote
from .expansion import ExpandedDensity
from .mc_oracle import PathSimulator
from .mc_oracle import SimGrid
from .model import ModelSpec
from .model import expansion_inputs

__all__ = [
    "bs_core",
    "BsQuote",
    "config",
    "errors",
    "ExpandedDensity",
    "expansion",
    "expansion_inputs",
    "mc_oracle",
    "model",
    "ModelSpec",
    "PathSimulator",
    "quadrature",
    "SimGrid",
]
