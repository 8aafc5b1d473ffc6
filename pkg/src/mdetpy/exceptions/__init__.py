from __future__ import annotations

from .base_exceptions import BaseMatchDetException as BaseMatchDetException
from .shape_mismatch_exception import ShapeMismatchException as ShapeMismatchException
from .non_finite_exception import NonFiniteException as NonFiniteException
from .non_finite_loss_exception import NonFiniteLossException as NonFiniteLossException
from .degenerate_geometry_exception import DegenerateGeometryException as DegenerateGeometryException
from .estimation_failure_exception import EstimationFailureException as EstimationFailureException
from .missing_input_exception import MissingInputException as MissingInputException
from .unsupported_exception import UnsupportedException as UnsupportedException
from .invalid_config_exception import InvalidConfigException as InvalidConfigException
