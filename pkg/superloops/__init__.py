from .cli import run
from .constants import VERSION

__version__ = VERSION

__all__ = ["run"]
