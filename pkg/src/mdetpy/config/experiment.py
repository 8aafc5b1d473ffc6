from __future__ import annotations

import json
from enum import Enum, verify, UNIQUE
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional

from ..elements import AttentionMode
from ..elements import Setting
from ..elements import Variant
from ..exceptions import InvalidConfigException
from ..exceptions import UnsupportedException
from ..synthdata import SceneSpec
from .validators import ConfigValidator
from .validators import ConstraintViolationError
from .validators import NumericRangeRequired
from .validators import OneOf
from .validators import Positive


def _to_bool(v: Any) -> bool:
    if isinstance(v, bool):
        return v
    if isinstance(v, str) and v.strip().lower() in ("true", "false"):
        return v.strip().lower() == "true"
    raise ConstraintViolationError("Boolean Value Required")


def _to_int(v: Any) -> int:
    if isinstance(v, bool) or (isinstance(v, float) and not v.is_integer()):
        raise ConstraintViolationError("Integer Value Required")
    return int(v)


def _to_float(v: Any) -> float:
    if isinstance(v, bool):
        raise ConstraintViolationError("Numeric Value Required")
    return float(v)


class _ConfigPropertyInfo:
    """
    Private class used to construct ConfigProperty enums: the JSON key of every
    experiment setting, how raw values are coerced and the validator they must pass
    """

    def __init__(
        self,
        key: str,
        coerce: Callable[[Any], Any],
        validator: Optional[ConfigValidator] = None,
        dump: Callable[[Any], Any] = lambda v: v,
    ) -> None:
        self._key = key
        self._coerce = coerce
        self._validator = validator
        self._dump = dump

    def __str__(self) -> str:
        return f"[{self._key}]"


_MATCHER_MODES = (AttentionMode.Cross, AttentionMode.Weighted, AttentionMode.WeightedSpatial)


@verify(UNIQUE)
class ConfigProperty(Enum):
    NetworkVariant = _ConfigPropertyInfo("variant", Variant.parse, dump=lambda v: v.label)
    InferenceSetting = _ConfigPropertyInfo("setting", Setting.parse, dump=lambda v: v.label)
    AlphaWAM = _ConfigPropertyInfo("alpha_wam", _to_float, NumericRangeRequired(0.0))
    AlphaWSAM = _ConfigPropertyInfo("alpha_wsam", _to_float, NumericRangeRequired(0.0))
    Beta = _ConfigPropertyInfo("beta", _to_float, NumericRangeRequired(0.0))
    Lambda = _ConfigPropertyInfo("lambda", _to_float, NumericRangeRequired(0.0))
    Tau = _ConfigPropertyInfo("tau", _to_float, Positive())
    Theta = _ConfigPropertyInfo("theta", _to_float, NumericRangeRequired(0.0, 1.0))
    NumWAM = _ConfigPropertyInfo("n_wam", _to_int, NumericRangeRequired(1))
    NumWSAM = _ConfigPropertyInfo("n_wsam", _to_int, NumericRangeRequired(1))
    LearningRate = _ConfigPropertyInfo("lr", _to_float, Positive())
    LearningRateDecay = _ConfigPropertyInfo("lr_decay", _to_float, NumericRangeRequired(0.0, 1.0))
    LearningRateDecayEpoch = _ConfigPropertyInfo("lr_decay_epoch", _to_int, NumericRangeRequired(0))
    Epochs = _ConfigPropertyInfo("epochs", _to_int, NumericRangeRequired(1))
    BatchSize = _ConfigPropertyInfo("batch_size", _to_int, NumericRangeRequired(1))
    Seed = _ConfigPropertyInfo("seed", _to_int, NumericRangeRequired(0))
    Momentum = _ConfigPropertyInfo("momentum", _to_float, NumericRangeRequired(0.0, 0.999))
    WeightDecay = _ConfigPropertyInfo("weight_decay", _to_float, NumericRangeRequired(0.0))
    GradClip = _ConfigPropertyInfo("grad_clip", _to_float, NumericRangeRequired(0.0))
    TrainPairs = _ConfigPropertyInfo("train_pairs", _to_int, NumericRangeRequired(1))
    EvalPairs = _ConfigPropertyInfo("eval_pairs", _to_int, NumericRangeRequired(1))
    Workers = _ConfigPropertyInfo("workers", _to_int, NumericRangeRequired(1))
    EvalEvery = _ConfigPropertyInfo("eval_every", _to_int, NumericRangeRequired(0))
    MatcherAttention = _ConfigPropertyInfo(
        "matcher_attention", AttentionMode.parse, OneOf(_MATCHER_MODES), dump=lambda v: v.label
    )
    DetectorAttention = _ConfigPropertyInfo(
        "detector_attention", AttentionMode.parse, OneOf(_MATCHER_MODES), dump=lambda v: v.label
    )
    DecoderWeight = _ConfigPropertyInfo("decoder_weight", _to_float, NumericRangeRequired(0.0))
    RansacIters = _ConfigPropertyInfo("ransac_iters", _to_int, NumericRangeRequired(1))
    RansacInlierPx = _ConfigPropertyInfo("ransac_inlier_px", _to_float, Positive())
    RecordWallTime = _ConfigPropertyInfo("record_wall_time", _to_bool)
    Channels = _ConfigPropertyInfo("channels", _to_int, NumericRangeRequired(1))
    OutDir = _ConfigPropertyInfo("out_dir", str, dump=str)

    @property
    def key(self) -> str:
        return self.value._key

    @classmethod
    def by_key(cls, key: str) -> ConfigProperty:
        for p in cls:
            if p.key == key:
                return p
        raise InvalidConfigException(key, "unknown key")

    def coerce(self, raw: Any) -> Any:
        """Coerces and validates a raw value; violations surface as InvalidConfigException"""
        try:
            v = self.value._coerce(raw)
            if self.value._validator is not None:
                self.value._validator.validate(v)
            return v
        except (ConstraintViolationError, UnsupportedException, TypeError, ValueError) as e:
            raise InvalidConfigException(self.key, str(e)) from e

    def dump(self, v: Any) -> Any:
        return self.value._dump(v)


_EXPERIMENT_DEFAULTS: Dict[ConfigProperty, Any] = {
    ConfigProperty.NetworkVariant: Variant.MatchDet,
    ConfigProperty.InferenceSetting: Setting.GTBoxR,
    ConfigProperty.AlphaWAM: 1.0,
    ConfigProperty.AlphaWSAM: 1.0,
    ConfigProperty.Beta: 1.0,
    ConfigProperty.Lambda: 1.0,
    ConfigProperty.Tau: 0.1,
    ConfigProperty.Theta: 0.2,
    ConfigProperty.NumWAM: 2,
    ConfigProperty.NumWSAM: 1,
    ConfigProperty.LearningRate: 0.01,
    ConfigProperty.LearningRateDecay: 0.1,
    ConfigProperty.LearningRateDecayEpoch: 8,
    ConfigProperty.Epochs: 12,
    ConfigProperty.BatchSize: 8,
    ConfigProperty.Seed: 0,
    ConfigProperty.Momentum: 0.9,
    ConfigProperty.WeightDecay: 1e-4,
    ConfigProperty.GradClip: 5.0,
    ConfigProperty.TrainPairs: 256,
    ConfigProperty.EvalPairs: 64,
    ConfigProperty.Workers: 1,
    ConfigProperty.EvalEvery: 1,
    ConfigProperty.MatcherAttention: AttentionMode.Weighted,
    ConfigProperty.DetectorAttention: AttentionMode.WeightedSpatial,
    ConfigProperty.DecoderWeight: 1.0,
    ConfigProperty.RansacIters: 1000,
    ConfigProperty.RansacInlierPx: 3.0,
    ConfigProperty.RecordWallTime: True,
    ConfigProperty.Channels: 16,
    ConfigProperty.OutDir: "runs",
}

_SCENE_KEY = "scene"


class ExperimentConfig:
    """
    Immutable experiment settings. Built from defaults overlaid with JSON keys; every
    value is coerced and validated on the way in, and unknown keys are rejected.
    """

    __slots__ = ("_values", "_scene")

    @classmethod
    def from_json(cls, path: str | Path) -> ExperimentConfig:
        try:
            with open(path, encoding="utf-8") as f:
                d = json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidConfigException(None, f"{path}: {e}") from e
        if not isinstance(d, dict):
            raise InvalidConfigException(None, f"{path}: expected a JSON object")
        return cls.from_dict(d)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> ExperimentConfig:
        return cls(**d)

    def __init__(self, **kwargs: Any) -> None:
        values = dict(_EXPERIMENT_DEFAULTS)
        scene = kwargs.pop(_SCENE_KEY, None)
        for key, raw in kwargs.items():
            p = ConfigProperty.by_key(key)
            values[p] = p.coerce(raw)
        self._values = values
        self._scene = self._make_scene(scene)

    @staticmethod
    def _make_scene(scene: SceneSpec | Mapping[str, Any] | None) -> SceneSpec:
        if scene is None:
            return SceneSpec()
        if isinstance(scene, SceneSpec):
            return scene
        try:
            return SceneSpec.from_dict(dict(scene))
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidConfigException(_SCENE_KEY, str(e)) from e

    def __repr__(self) -> str:
        return f"ExperimentConfig({self.variant.label}, {self.setting.label}, seed={self.seed})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExperimentConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash(json.dumps(self.to_dict(), sort_keys=True))

    def get(self, p: ConfigProperty) -> Any:
        return self._values[p]

    def to_dict(self) -> Dict[str, Any]:
        d = {p.key: p.dump(self._values[p]) for p in ConfigProperty}
        d[_SCENE_KEY] = self._scene.to_dict()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def with_overrides(self, **kw: Any) -> ExperimentConfig:
        """A copy with the given JSON keys replaced; "scene" takes a SceneSpec or mapping"""
        d: Dict[str, Any] = {p.key: self._values[p] for p in ConfigProperty}
        d[_SCENE_KEY] = self._scene
        d.update(kw)
        return ExperimentConfig(**d)

    @property
    def scene(self) -> SceneSpec:
        return self._scene

    @property
    def variant(self) -> Variant:
        return self.get(ConfigProperty.NetworkVariant)  # type: ignore[no-any-return]

    @property
    def setting(self) -> Setting:
        return self.get(ConfigProperty.InferenceSetting)  # type: ignore[no-any-return]

    @property
    def alpha_wam(self) -> float:
        return float(self.get(ConfigProperty.AlphaWAM))

    @property
    def alpha_wsam(self) -> float:
        return float(self.get(ConfigProperty.AlphaWSAM))

    @property
    def beta(self) -> float:
        return float(self.get(ConfigProperty.Beta))

    @property
    def lam(self) -> float:
        return float(self.get(ConfigProperty.Lambda))

    @property
    def tau(self) -> float:
        return float(self.get(ConfigProperty.Tau))

    @property
    def theta(self) -> float:
        return float(self.get(ConfigProperty.Theta))

    @property
    def n_wam(self) -> int:
        return int(self.get(ConfigProperty.NumWAM))

    @property
    def n_wsam(self) -> int:
        return int(self.get(ConfigProperty.NumWSAM))

    @property
    def lr(self) -> float:
        return float(self.get(ConfigProperty.LearningRate))

    @property
    def lr_decay(self) -> float:
        return float(self.get(ConfigProperty.LearningRateDecay))

    @property
    def lr_decay_epoch(self) -> int:
        return int(self.get(ConfigProperty.LearningRateDecayEpoch))

    @property
    def epochs(self) -> int:
        return int(self.get(ConfigProperty.Epochs))

    @property
    def batch_size(self) -> int:
        return int(self.get(ConfigProperty.BatchSize))

    @property
    def seed(self) -> int:
        return int(self.get(ConfigProperty.Seed))

    @property
    def momentum(self) -> float:
        return float(self.get(ConfigProperty.Momentum))

    @property
    def weight_decay(self) -> float:
        return float(self.get(ConfigProperty.WeightDecay))

    @property
    def grad_clip(self) -> float:
        return float(self.get(ConfigProperty.GradClip))

    @property
    def train_pairs(self) -> int:
        return int(self.get(ConfigProperty.TrainPairs))

    @property
    def eval_pairs(self) -> int:
        return int(self.get(ConfigProperty.EvalPairs))

    @property
    def workers(self) -> int:
        return int(self.get(ConfigProperty.Workers))

    @property
    def eval_every(self) -> int:
        """Held-out evaluation period in epochs; 0 evaluates after the last epoch only"""
        return int(self.get(ConfigProperty.EvalEvery))

    @property
    def matcher_attention(self) -> AttentionMode:
        return self.get(ConfigProperty.MatcherAttention)  # type: ignore[no-any-return]

    @property
    def detector_attention(self) -> AttentionMode:
        return self.get(ConfigProperty.DetectorAttention)  # type: ignore[no-any-return]

    @property
    def decoder_weight(self) -> float:
        return float(self.get(ConfigProperty.DecoderWeight))

    @property
    def ransac_iters(self) -> int:
        return int(self.get(ConfigProperty.RansacIters))

    @property
    def ransac_inlier_px(self) -> float:
        return float(self.get(ConfigProperty.RansacInlierPx))

    @property
    def record_wall_time(self) -> bool:
        return bool(self.get(ConfigProperty.RecordWallTime))

    @property
    def channels(self) -> int:
        return int(self.get(ConfigProperty.Channels))

    @property
    def out_dir(self) -> Path:
        return Path(self.get(ConfigProperty.OutDir))
