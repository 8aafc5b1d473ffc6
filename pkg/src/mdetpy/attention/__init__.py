from __future__ import annotations

from .weighted import attention_weights as attention_weights
from .weighted import cross_attention as cross_attention
from .weighted import weighted_attention as weighted_attention
from .weighted import weighted_attention_matrix as weighted_attention_matrix
from .weighted import ws_attention as ws_attention
from .weighted import ws_attention_matrix as ws_attention_matrix
from .weighted import ws_attention_combined as ws_attention_combined
from .blocks import BlockParams as BlockParams
from .blocks import init_block_params as init_block_params
from .blocks import transformer_block as transformer_block
from .modules import N_WAM as N_WAM
from .modules import N_WSAM as N_WSAM
from .modules import init_wam_params as init_wam_params
from .modules import init_wsam_params as init_wsam_params
from .modules import wam_forward as wam_forward
from .modules import wsam_forward as wsam_forward
from .analysis import TwoComponentSpec as TwoComponentSpec
from .analysis import construct_two_component_pair as construct_two_component_pair
from .analysis import bare_wam_round as bare_wam_round
from .analysis import bare_wsam_round as bare_wsam_round
from .analysis import mean_cosine as mean_cosine
from .analysis import mean_norm_ratio as mean_norm_ratio
