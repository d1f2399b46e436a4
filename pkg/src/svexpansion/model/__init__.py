from .conditional import Affine
from .conditional import ConditionalMean
from .conditional import Custom
from .curves import CURVE_TYPES
from .curves import Flat
from .curves import ForwardVarianceCurve
from .curves import PiecewiseConstant
from .kernels import KERNEL_TYPES
from .kernels import Exponential
from .kernels import Kernel
from .kernels import Power
from .kernels import Tabulated
from .spec import ExpansionInputs
from .spec import Factor
from .spec import ModelSpec
from .spec import cross_covariance
from .spec import cross_covariance_closed_form
from .spec import expansion_inputs
from .spec import total_base_variance

__all__ = [
    "Affine",
    "ConditionalMean",
    "CURVE_TYPES",
    "Custom",
    "cross_covariance",
    "cross_covariance_closed_form",
    "ExpansionInputs",
    "expansion_inputs",
    "Exponential",
    "Factor",
    "Flat",
    "ForwardVarianceCurve",
    "Kernel",
    "KERNEL_TYPES",
    "ModelSpec",
    "PiecewiseConstant",
    "Power",
    "Tabulated",
    "total_base_variance",
]
