from __future__ import annotations

from .scene import SceneSpec as SceneSpec
from .scene import class_signatures as class_signatures
from .scene import generate_scene as generate_scene
from .pairs import GroundTruthMatches as GroundTruthMatches
from .pairs import SceneSample as SceneSample
from .pairs import derive_gt_matches as derive_gt_matches
from .pairs import generate_samples as generate_samples
from .pairs import make_pair as make_pair
from .pairs import make_sample as make_sample
from .pairs import random_homography as random_homography
from .manifest import read_manifest as read_manifest
from .manifest import write_manifest as write_manifest
