"""
dqkit - deformation quantization toolkit in Python

Exact polyvector and polydifferential calculus over ℚ, Maurer–Cartan
checks, Kontsevich graph enumeration with Monte-Carlo weights, star-product
assembly and Hochschild cohomology of finite-dimensional algebras.
"""

__version__ = "0.1.0"

from dqkit.core.config import RunDefaults, load_defaults
from dqkit.core.poly import Poly
from dqkit.core.series import HSeries

__all__ = [
    "__version__",
    "HSeries",
    "Poly",
    "RunDefaults",
    "load_defaults",
]
