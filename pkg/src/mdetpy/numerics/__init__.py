from __future__ import annotations

from .matrix import FloatArray as FloatArray
from .matrix import Matrix as Matrix
from .tape import Tape as Tape
from .tape import Gradients as Gradients
from .tape import backward as backward
from .parameters import Parameters as Parameters
from .gradcheck import finite_diff_grad as finite_diff_grad
from .gradcheck import relative_error as relative_error
from .gradcheck import check_gradients as check_gradients
from . import ops as ops
