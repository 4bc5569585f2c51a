"""Free Z/4 actions on S^2 x S^2, quaternionic lens spaces, and their numerical verification."""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
