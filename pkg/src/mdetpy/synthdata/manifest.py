from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Final, List, Sequence

import numpy as np
from loguru import logger
from pyroaring import FrozenBitMap

from ..elements import BBox
from ..elements import FeatureGrid
from ..geometry import Homography
from .pairs import SceneSample, derive_gt_matches

MANIFEST_NAME: Final = "manifest.jsonl"


def _save_grid(grid: FeatureGrid, path: Path) -> None:
    np.save(path, grid.numpy().astype("<f8"), allow_pickle=False)


def _load_grid(path: Path) -> FeatureGrid:
    return FeatureGrid.from_array(np.load(path, allow_pickle=False))


def _sample_record(sample: SceneSample, ref_name: str, tgt_name: str) -> Dict[str, Any]:
    return {
        "index": sample.index,
        "seed": sample.seed,
        "ref": ref_name,
        "tgt": tgt_name,
        "h_gt": sample.h_gt.to_list(),
        "boxes_r": [b.to_dict() for b in sample.boxes_r],
        "boxes_t": [b.to_dict() for b in sample.boxes_t],
        "dropped_t": list(sample.dropped_t),
        "matches": sample.gt_matches.to_list(),
    }


def write_manifest(samples: Sequence[SceneSample], directory: str | Path) -> Path:
    """
    Writes every grid as a little-endian f64 .npy file next to a JSON-lines manifest
    holding one record per sample; returns the manifest path
    """
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    manifest = root / MANIFEST_NAME
    with open(manifest, "w", encoding="utf-8") as f:
        for sample in samples:
            ref_name, tgt_name = f"ref_{sample.index:06d}.npy", f"tgt_{sample.index:06d}.npy"
            _save_grid(sample.ref_grid, root / ref_name)
            _save_grid(sample.tgt_grid, root / tgt_name)
            f.write(json.dumps(_sample_record(sample, ref_name, tgt_name)) + "\n")
    logger.info("wrote {n} samples to {path}", n=len(samples), path=manifest)
    return manifest


def read_manifest(path: str | Path) -> List[SceneSample]:
    """Reads a manifest file, or the manifest inside a directory, back into samples"""
    manifest = Path(path)
    if manifest.is_dir():
        manifest = manifest / MANIFEST_NAME
    root = manifest.parent
    samples: List[SceneSample] = []
    with open(manifest, encoding="utf-8") as f:
        for n, line in enumerate(f, start=1):
            if not line.strip():
                continue
            rec = json.loads(line)
            ref_grid = _load_grid(root / rec["ref"])
            tgt_grid = _load_grid(root / rec["tgt"])
            h_gt = Homography.from_list(rec["h_gt"])
            matches = derive_gt_matches(h_gt, ref_grid.h, ref_grid.w)
            if matches.to_list() != rec["matches"]:
                raise ValueError(f"{manifest}:{n}: stored matches disagree with h_gt")
            samples.append(
                SceneSample(
                    ref_grid=ref_grid,
                    tgt_grid=tgt_grid,
                    h_gt=h_gt,
                    boxes_r=tuple(BBox.from_dict(b) for b in rec["boxes_r"]),
                    boxes_t=tuple(BBox.from_dict(b) for b in rec["boxes_t"]),
                    gt_matches=matches,
                    dropped_t=FrozenBitMap(rec["dropped_t"]),
                    index=int(rec["index"]),
                    seed=int(rec["seed"]),
                )
            )
    return samples
