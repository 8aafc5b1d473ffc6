from __future__ import annotations

from .maps import ALPHA_WAM as ALPHA_WAM
from .maps import ALPHA_WSAM as ALPHA_WSAM
from .maps import BETA as BETA
from .maps import rasterize_boxes as rasterize_boxes
from .maps import map_from_boxes as map_from_boxes
from .maps import map_from_mask as map_from_mask
from .maps import generate_wam_maps as generate_wam_maps
from .maps import generate_wsam_maps as generate_wsam_maps
from .maps import box_filter_maps as box_filter_maps
from .decoder import init_decoder_params as init_decoder_params
from .decoder import light_decoder as light_decoder
from .decoder import dice_distance as dice_distance
from .decoder import box_projection_loss as box_projection_loss
