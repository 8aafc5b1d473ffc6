from __future__ import annotations

from .homography import Homography as Homography
from .homography import Correspondence as Correspondence
from .homography import project as project
from .estimation import estimate_dlt as estimate_dlt
from .estimation import dlt_from_points as dlt_from_points
from .estimation import ransac_homography as ransac_homography
from .estimation import reprojection_errors as reprojection_errors
from .warping import warp_grid as warp_grid
from .warping import cell_centers as cell_centers
from .warping import cell_homography as cell_homography
from .metrics import corner_error as corner_error
from .metrics import auc as auc
from .metrics import auc_summary as auc_summary
