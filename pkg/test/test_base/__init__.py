from __future__ import annotations

from .test_base import GRAD_TOL as GRAD_TOL
from .test_base import TEST_SEED as TEST_SEED
from .test_base import TestBase as TestBase
