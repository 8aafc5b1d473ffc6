from __future__ import annotations

from .validators import ConfigValidator as ConfigValidator
from .validators import ConstraintViolationError as ConstraintViolationError
from .validators import NumericRange as NumericRange
from .validators import NumericRangeRequired as NumericRangeRequired
from .validators import OneOf as OneOf
from .validators import Positive as Positive
from .experiment import ConfigProperty as ConfigProperty
from .experiment import ExperimentConfig as ExperimentConfig
