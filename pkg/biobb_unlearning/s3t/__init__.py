from . import core
from . import selection
from . import engine
from . import analytics
from . import montecarlo
from . import registry

name = "s3t"
__all__ = ["core", "selection", "engine", "analytics", "montecarlo", "registry"]
