from __future__ import annotations

from .params import BACKBONE_PREFIX as BACKBONE_PREFIX
from .params import backbone as backbone
from .params import init_model_params as init_model_params
from .report import CSV_COLUMNS as CSV_COLUMNS
from .report import EpochRecord as EpochRecord
from .report import RunReport as RunReport
from .report import emit_report as emit_report
from .report import read_json_reports as read_json_reports
from .pipeline import PipelineOutput as PipelineOutput
from .pipeline import estimate_homography as estimate_homography
from .pipeline import forward as forward
from .pipeline import forward_matchdet as forward_matchdet
from .pipeline import forward_mdbase as forward_mdbase
from .pipeline import match_correspondences as match_correspondences
from .training import EvalResult as EvalResult
from .training import Trainer as Trainer
from .training import evaluate as evaluate
from .training import learning_rate as learning_rate
from .training import sample_gradients as sample_gradients
from .training import train as train
from .ablation import ABLATION_PROTOCOL as ABLATION_PROTOCOL
from .ablation import AblationRow as AblationRow
from .ablation import check_ablation as check_ablation
from .ablation import protocol_config as protocol_config
from .ablation import run_ablation as run_ablation
from .ablation import summarize as summarize
from .ablation import write_ablation as write_ablation
from .gradcheck_suite import GradcheckResult as GradcheckResult
from .gradcheck_suite import run_gradcheck_suite as run_gradcheck_suite
