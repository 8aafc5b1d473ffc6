__version__ = "0.1.0.dev1"

# elements loads ahead of numerics, whose modules import Component from it
from . import elements as elements  # noqa: E402
