from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from time import perf_counter
from typing import Any, Callable, Dict, Final, List, Optional, Sequence, Tuple, TypeVar

import attrs
import numpy as np
from loguru import logger

from ..config import ExperimentConfig
from ..exceptions import NonFiniteException
from ..exceptions import NonFiniteLossException
from ..geometry import auc_summary
from ..geometry import corner_error
from ..minidet import AveragePrecisionEvaluator
from ..numerics import FloatArray
from ..numerics import Parameters
from ..numerics import Tape
from ..synthdata import SceneSample
from ..synthdata import generate_samples
from ..utils import rng_for
from ..utils import timer
from .params import init_model_params
from .pipeline import LOSS_KEYS, forward
from .report import EpochRecord, RunReport

# held-out samples start here, far beyond any training index
EVAL_OFFSET: Final = 1 << 20
SNAPSHOT_NAME: Final = "nan_snapshot.json"
SHUFFLE_STREAM: Final = 301

T = TypeVar("T")
R = TypeVar("R")


def _map_ordered(fn: Callable[[T], R], items: Sequence[T], workers: int) -> List[R]:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def sample_gradients(
    sample: SceneSample,
    params: Parameters,
    config: ExperimentConfig,
) -> Tuple[Dict[str, FloatArray], Dict[str, float]]:
    """Gradients of one sample's total loss on a tape of its own, plus the loss terms"""
    tape = Tape()
    bound = params.bind(tape)
    out = forward(sample, bound, config, estimate=False)
    grads = tape.backward(out.losses["total"])
    return Parameters.collect(grads, bound), out.loss_values()


@attrs.frozen
class EvalResult:
    corner_errors: Tuple[float, ...]
    auc: Dict[str, float]
    ap: Dict[str, float]


def evaluate(samples: Sequence[SceneSample], params: Parameters, config: ExperimentConfig) -> EvalResult:
    """Corner-error AUC and COCO-style AP over a split, without recording gradients"""
    bound = params.bind()

    def run(sample: SceneSample) -> Tuple[float, Any]:
        out = forward(sample, bound, config)
        err = corner_error(out.h_est, sample.h_gt, sample.w, sample.h)
        return err, out.detections

    results = _map_ordered(run, samples, config.workers)
    evaluator = AveragePrecisionEvaluator()
    for sample, (_, dets) in zip(samples, results):
        evaluator.add(dets, sample.boxes_t)
    errors = tuple(float(e) for e, _ in results)
    return EvalResult(errors, auc_summary(list(errors)), evaluator.evaluate().to_dict())


def learning_rate(config: ExperimentConfig, epoch: int) -> float:
    """Step schedule: lr until lr_decay_epoch, lr * lr_decay from then on (epochs count from 0)"""
    return config.lr * (config.lr_decay if epoch >= config.lr_decay_epoch else 1.0)


def _write_snapshot(
    config: ExperimentConfig,
    epoch: int,
    step: int,
    batch: Sequence[SceneSample],
    terms: Sequence[Dict[str, float]],
    out_dir: Optional[Path],
) -> Tuple[Dict[str, Any], Optional[Path]]:
    snapshot: Dict[str, Any] = {
        "epoch": epoch,
        "step": step,
        "lr": learning_rate(config, epoch),
        "samples": [s.index for s in batch],
        "losses": [{k: (v if np.isfinite(v) else str(v)) for k, v in t.items()} for t in terms],
        "config": config.to_dict(),
    }
    path: Optional[Path] = None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / SNAPSHOT_NAME
        path.write_text(json.dumps(snapshot, indent=2))
    return snapshot, path


class Trainer:
    """
    Mini-batch SGD over a fixed synthetic training split. Per-sample gradients are
    computed in parallel and summed in sample-index order, so a run is reproducible
    whatever the worker count.
    """

    __slots__ = ("_config", "_params", "_train", "_eval", "_out_dir", "_history")

    def __init__(
        self,
        config: ExperimentConfig,
        params: Optional[Parameters] = None,
        train: Optional[Sequence[SceneSample]] = None,
        held_out: Optional[Sequence[SceneSample]] = None,
        out_dir: Optional[Path] = None,
    ) -> None:
        self._config = config
        self._params = params if params is not None else init_model_params(config)
        scene = config.scene
        if train is None:
            train = generate_samples(scene, config.train_pairs, workers=config.workers)
        if held_out is None:
            held_out = generate_samples(scene, config.eval_pairs, offset=EVAL_OFFSET, workers=config.workers)
        self._train = list(train)
        self._eval = list(held_out)
        self._out_dir = out_dir
        self._history: List[EpochRecord] = []

    @property
    def params(self) -> Parameters:
        return self._params

    @property
    def history(self) -> List[EpochRecord]:
        return list(self._history)

    def evaluates_after(self, epoch: int) -> bool:
        """The held-out split is scored every eval_every epochs and always after the last"""
        every = self._config.eval_every
        return epoch == self._config.epochs - 1 or (every > 0 and (epoch + 1) % every == 0)

    def step(self, batch: Sequence[SceneSample], lr: float, epoch: int = 0, step: int = 0) -> Dict[str, float]:
        """One update from the summed gradients of a batch; returns the batch-mean loss terms"""
        config = self._config
        try:
            results = _map_ordered(lambda s: sample_gradients(s, self._params, config), batch, config.workers)
        except NonFiniteException as e:
            logger.error("non-finite value at epoch {epoch} step {step}: {e}", epoch=epoch, step=step, e=e)
            snapshot, path = _write_snapshot(config, epoch, step, batch, [], self._out_dir)
            raise NonFiniteLossException(snapshot, path) from e

        terms = [t for _, t in results]
        if not all(np.isfinite(t["total"]) for t in terms):
            logger.error("non-finite loss at epoch {epoch} step {step}", epoch=epoch, step=step)
            snapshot, path = _write_snapshot(config, epoch, step, batch, terms, self._out_dir)
            raise NonFiniteLossException(snapshot, path)

        summed: Dict[str, FloatArray] = {}
        for grads, _ in results:
            for name, g in grads.items():
                acc = summed.get(name)
                summed[name] = g.copy() if acc is None else acc + g
        scale = 1.0 / len(batch)
        mean_grads = {n: g * scale for n, g in summed.items()}
        self._params.apply_sgd(
            mean_grads, lr, momentum=config.momentum, weight_decay=config.weight_decay, clip=config.grad_clip
        )
        return {k: float(np.mean([t[k] for t in terms])) for k in LOSS_KEYS}

    def run_epoch(self, epoch: int) -> EpochRecord:
        config = self._config
        lr = learning_rate(config, epoch)
        order = rng_for(config.seed, SHUFFLE_STREAM, epoch).permutation(len(self._train))
        totals = {k: 0.0 for k in LOSS_KEYS}
        steps = 0
        for start in range(0, len(order), config.batch_size):
            batch = [self._train[i] for i in sorted(order[start : start + config.batch_size])]
            terms = self.step(batch, lr, epoch, steps)
            for k in LOSS_KEYS:
                totals[k] += terms[k]
            steps += 1
        means = {k: v / max(steps, 1) for k, v in totals.items()}
        logger.info(
            "epoch {epoch} lr={lr:.4g} loss={loss:.4f} matcher={m:.4f} detector={d:.4f} decoder={dec:.4f}",
            epoch=epoch,
            lr=lr,
            loss=means["total"],
            m=means["matcher"],
            d=means["detector"],
            dec=means["decoder"],
        )
        auc: Dict[str, float] = {}
        ap: Dict[str, float] = {}
        if self.evaluates_after(epoch):
            result = evaluate(self._eval, self._params, config)
            auc, ap = result.auc, result.ap
            logger.info("epoch {epoch} AUC3={auc3:.4f} AP={ap:.4f}", epoch=epoch, auc3=auc["AUC3"], ap=ap["AP"])
        record = EpochRecord(epoch=epoch, lr=lr, losses=means, auc=auc, ap=ap)
        self._history.append(record)
        return record

    @timer
    def fit(self) -> RunReport:
        start = perf_counter()
        for epoch in range(self._config.epochs):
            self.run_epoch(epoch)
        wall = perf_counter() - start
        return RunReport.from_history(self._config, self._history, wall)


def train(
    config: ExperimentConfig,
    out_dir: Optional[Path] = None,
    train_samples: Optional[Sequence[SceneSample]] = None,
    held_out: Optional[Sequence[SceneSample]] = None,
) -> Tuple[Parameters, RunReport]:
    trainer = Trainer(config, train=train_samples, held_out=held_out, out_dir=out_dir)
    report = trainer.fit()
    return trainer.params, report
