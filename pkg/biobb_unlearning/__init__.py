from . import s3t
from . import unlearning
name = "biobb_unlearning"
__all__ = ["s3t", "unlearning"]
__version__ = "1.0.0"
