"""
Post-hoc path audit against recorded collision snapshots
"""

import json
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from ..core.config import MotionConfig
from ..models.episode import EpisodeLog
from ..models.grid import BeliefGrid
from ..models.planning import Path, PathValidation
from ..motion.collision import CollisionModel
from ..motion.planner import interpolation_step, validate_path
from ..storage.base import BaseArtifactStore
from ..storage.codecs import decode_grid, parse_jsonl
from ..storage.local import LocalArtifactStore
from ..utils.async_helpers import sync_wrapper

logger = logging.getLogger(__name__)


@dataclass
class AuditReport:
    """Paths checked, failures as (policy, scene, step index, segment) and unaudited steps"""
    checked: int = 0
    failures: List[Tuple[str, int, int, Optional[int]]] = field(default_factory=list)
    missing: List[Tuple[str, int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"checked": self.checked, "ok": self.ok,
                "failures": [list(f) for f in self.failures],
                "missing": [list(m) for m in self.missing]}


def audit_path(path: Path, grid: BeliefGrid, snapshot: dict, motion: MotionConfig) -> PathValidation:
    model = CollisionModel.from_snapshot(snapshot, grid)
    return validate_path(path, model, interpolation_step(motion, model))


def audit_episode(log: EpisodeLog, motion: MotionConfig, report: Optional[AuditReport] = None) -> AuditReport:
    """Validate every executed path of an episode recorded with snapshots"""
    report = report or AuditReport()
    for index, step in enumerate(log.steps):
        if step.path is None:
            continue
        if step.collision_grid is None or step.collision_snapshot is None:
            report.missing.append((log.policy, log.scene_seed, index))
            continue
        check = audit_path(step.path, step.collision_grid, step.collision_snapshot, motion)
        report.checked += 1
        if not check.ok:
            report.failures.append((log.policy, log.scene_seed, index, check.first_failure))
    return report


async def audit_directory_async(store: BaseArtifactStore, motion: MotionConfig) -> AuditReport:
    """
    Validate every path in ``episodes.jsonl`` against the collision snapshot
    written next to it.

    Raises:
        StorageError: If ``episodes.jsonl`` is missing or unreadable
    """
    report = AuditReport()
    episodes = parse_jsonl(await store.read_text("episodes.jsonl"))
    for episode in episodes:
        policy, scene = episode["policy"], int(episode["scene_seed"])
        for index, step in enumerate(episode["steps"]):
            if step.get("path") is None:
                continue
            prefix = f"snapshots/{policy}/{scene}/step_{index:02d}_collision"
            if not (await store.exists(f"{prefix}.ansv") and await store.exists(f"{prefix}.json")):
                report.missing.append((policy, scene, index))
                continue
            meta = json.loads(await store.read_text(f"{prefix}.json"))
            grid = decode_grid(await store.read_bytes(f"{prefix}.ansv"), meta["grid"])
            check = audit_path(Path.from_dict(step["path"]), grid, meta["model"], motion)
            report.checked += 1
            if not check.ok:
                report.failures.append((policy, scene, index, check.first_failure))
                logger.warning(f"Path of {policy} scene {scene} step {index} collides at segment "
                               f"{check.first_failure}")
    logger.info(f"Audited {report.checked} paths: {len(report.failures)} failures, "
                f"{len(report.missing)} without snapshots")
    return report


def audit_directory(out_dir: str, motion: MotionConfig) -> AuditReport:
    return sync_wrapper(audit_directory_async(LocalArtifactStore(out_dir), motion))
