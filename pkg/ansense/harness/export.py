"""
Run artifact export

Layout below the output directory:

    metrics.csv            one row per (policy, scene)
    timings.csv            wall-clock planning seconds per (policy, scene)
    episodes.jsonl         one episode per line, seed-determined fields only
    mpc_traces.jsonl       one bilevel MPC trace per planned step
    summary.json           per-policy aggregates
    snapshots/<policy>/<scene>/step_NN_*   depth/instance PGM, belief PPM views,
                                           belief and collision grids
    snapshots/<policy>/<scene>/instance_NN.xyz   final instance points, ASCII XYZ
    manifest.json          sha256 of every file above
"""

import csv
import io
import json
import logging
from typing import Dict, List, Optional, Sequence

from ..core.utils import content_hash, to_jsonable
from ..models.episode import EpisodeLog, EpisodeSummary, MetricsTable
from ..scene.render import orthographic_views
from ..storage.base import BaseArtifactStore
from ..storage.codecs import depth_pgm, encode_grid, instance_pgm, jsonl_lines, points_to_xyz, rgb_ppm
from ..storage.local import LocalArtifactStore
from ..utils.async_helpers import sync_wrapper
from .benchmark import summarize

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"


def metrics_csv(episodes: Sequence[EpisodeSummary], with_timing: bool = False) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = list(EpisodeSummary.CSV_FIELDS) + (["planning_seconds"] if with_timing else [])
    writer.writerow(header)
    for episode in episodes:
        writer.writerow(episode.csv_row(with_timing))
    return buffer.getvalue()


def timings_csv(episodes: Sequence[EpisodeSummary]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["policy", "scene_seed", "planning_seconds"])
    for episode in episodes:
        writer.writerow([episode.policy, episode.scene_seed, repr(float(episode.planning_seconds))])
    return buffer.getvalue()


def _json(data) -> str:
    return json.dumps(to_jsonable(data), indent=2, sort_keys=True) + "\n"


def mpc_trace_records(logs: Sequence[EpisodeLog]) -> List[dict]:
    """One record per step that carries an MPC trace, in episode and step order"""
    records = []
    for log in logs:
        for index, step in enumerate(log.steps):
            if step.mpc_trace is None:
                continue
            records.append({"policy": log.policy, "scene_seed": log.scene_seed, "step": index,
                            "t": step.t, "discarded": step.discarded, "trace": step.mpc_trace.to_dict()})
    return records


async def _write_snapshots(store: BaseArtifactStore, log: EpisodeLog) -> List[str]:
    written = []
    base = f"snapshots/{log.policy}/{log.scene_seed}"
    for index, step in enumerate(log.steps):
        prefix = f"{base}/step_{index:02d}"
        if step.observation is not None:
            written.append(await store.write_bytes(f"{prefix}_depth.pgm", depth_pgm(step.observation)))
            written.append(await store.write_bytes(f"{prefix}_instance.pgm", instance_pgm(step.observation)))
        if step.grid is not None:
            for axis, image in orthographic_views(step.grid).items():
                written.append(await store.write_bytes(f"{prefix}_belief_{axis}.ppm", rgb_ppm(image)))
        if step.collision_grid is not None and step.collision_snapshot is not None:
            data, sidecar = encode_grid(step.collision_grid)
            written.append(await store.write_bytes(f"{prefix}_collision.ansv", data))
            written.append(await store.write_text(
                f"{prefix}_collision.json", _json({"grid": sidecar, "model": step.collision_snapshot})))
    for instance_id, points in sorted(log.instance_points.items()):
        written.append(await store.write_text(f"{base}/instance_{instance_id:02d}.xyz", points_to_xyz(points)))
    return written


async def build_manifest(store: BaseArtifactStore) -> Dict[str, str]:
    """sha256 of every artifact except the manifest itself"""
    entries = {}
    for name in await store.list_artifacts():
        if name == MANIFEST:
            continue
        entries[name] = content_hash(await store.read_bytes(name))
    return entries


async def export_artifacts_async(logs: Sequence[EpisodeLog], store: BaseArtifactStore,
                                 table: Optional[MetricsTable] = None,
                                 with_timing: bool = False) -> Dict[str, str]:
    """
    Write every run artifact and the manifest.

    Args:
        logs: Episode logs (snapshots are written for steps that carry them)
        store: Artifact store rooted at the output directory
        table: Aggregates for metrics.csv and summary.json; built from the logs when omitted
        with_timing: Add the planning-time column to metrics.csv and summary.json

    Returns:
        Manifest {relative path: sha256}

    Raises:
        StorageError: On any write failure, with the failing path
    """
    if table is None:
        policies = list(dict.fromkeys(log.policy for log in logs))
        t_max = max((len(log.coverage_curve) for log in logs), default=0)
        table = summarize(logs, policies, t_max)

    await store.write_text("metrics.csv", metrics_csv(table.episodes, with_timing))
    await store.write_text("timings.csv", timings_csv(table.episodes))
    await store.write_lines("episodes.jsonl", jsonl_lines(log.to_dict() for log in logs))
    await store.write_lines("mpc_traces.jsonl", jsonl_lines(mpc_trace_records(logs)))
    await store.write_text("summary.json", _json(table.to_dict(with_timing)))
    for log in logs:
        await _write_snapshots(store, log)

    manifest = await build_manifest(store)
    await store.write_text(MANIFEST, _json(manifest))
    logger.info(f"Exported {len(logs)} episodes and {len(manifest)} files")
    return manifest


def export_artifacts(logs: Sequence[EpisodeLog], out_dir: str,
                     table: Optional[MetricsTable] = None, with_timing: bool = False) -> Dict[str, str]:
    """Synchronous export into a local directory"""
    store = LocalArtifactStore(out_dir)
    return sync_wrapper(export_artifacts_async(logs, store, table, with_timing))
