from __future__ import annotations

from .scoring import TAU as TAU
from .scoring import ScoreMatrix as ScoreMatrix
from .scoring import score_matrix as score_matrix
from .scoring import dual_softmax as dual_softmax
from .scoring import apply_box_filter as apply_box_filter
from .selection import THETA as THETA
from .selection import Match as Match
from .selection import MatchSet as MatchSet
from .selection import mnn_select as mnn_select
from .loss import matcher_loss as matcher_loss
