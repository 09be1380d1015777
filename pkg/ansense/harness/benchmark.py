"""
Benchmark protocol and ablations

Fresh evaluation scenes (seeds disjoint from any training seed) are generated
once; every policy runs on every scene and per-policy aggregates are computed in
a fixed order.
"""

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..core.config import AnsenseConfig
from ..core.utils import mean_std
from ..exceptions import SceneGenerationError
from ..models.episode import BenchmarkRun, EpisodeLog, EpisodeSummary, MetricsTable, PolicyMetrics
from ..models.scene import SceneSpec
from ..scene.generation import generate_scene
from ..scene.geometry import scene_geometry
from ..score.factory import create_score_model, load_surrogate
from ..score.surrogate import SurrogateNet
from ..vpformer.model import VPFormer
from .episode import run_episode
from .policies import create_policy

logger = logging.getLogger(__name__)

BUCKETS = ("small", "medium", "large")


def evaluation_seeds(config: AnsenseConfig, n_scenes: int, seed: int) -> List[int]:
    """Evaluation scene seeds; all at or above the configured evaluation base"""
    base = config.benchmark.eval_seed_base + seed * 10_000
    return [base + i for i in range(n_scenes)]


def evaluation_scenes(config: AnsenseConfig, n_scenes: int, seed: int) -> List[SceneSpec]:
    specs = []
    for scene_seed in evaluation_seeds(config, n_scenes, seed):
        try:
            specs.append(generate_scene(config.scene, scene_seed))
        except SceneGenerationError as e:
            logger.warning(f"Skipping evaluation scene {scene_seed}: {e}")
    return specs


def volume_edges(volumes: Sequence[float]) -> tuple:
    """Tercile edges of the scene volumes"""
    if not volumes:
        return 0.0, 0.0
    lo, hi = np.quantile(np.asarray(volumes, dtype=np.float64), [1.0 / 3.0, 2.0 / 3.0])
    return float(lo), float(hi)


def volume_bucket(volume: float, edges: tuple) -> str:
    if volume <= edges[0]:
        return BUCKETS[0]
    if volume <= edges[1]:
        return BUCKETS[1]
    return BUCKETS[2]


def coverage_curve(logs: Sequence[EpisodeLog], length: int) -> List[float]:
    """Mean coverage after each view index; finished episodes hold their final value"""
    if not logs:
        return []
    curves = np.zeros((len(logs), length))
    for row, log in enumerate(logs):
        curve = log.coverage_curve or [log.initial_coverage]
        padded = curve[:length] + [curve[-1]] * max(0, length - len(curve))
        curves[row] = padded
    return curves.mean(axis=0).tolist()


def summarize(logs: Sequence[EpisodeLog], policies: Sequence[str], t_max: int) -> MetricsTable:
    """Aggregate episode logs into the metrics table"""
    edges = volume_edges(sorted({log.scene_volume for log in logs}))
    episodes = [EpisodeSummary(log.policy, log.scene_seed, log.scene_volume,
                               volume_bucket(log.scene_volume, edges), log.num_viewpoints,
                               log.success, log.status.value, log.final_coverage,
                               log.cspace, log.workspace, log.planning_seconds, log.mean_chamfer)
                for log in logs]
    rows = []
    for policy in policies:
        mine = [log for log in logs if log.policy == policy]
        if not mine:
            continue
        chamfers = [log.mean_chamfer for log in mine if log.mean_chamfer is not None]
        buckets: Dict[str, float] = {}
        for name in BUCKETS:
            counts = [e.viewpoints for e in episodes if e.policy == policy and e.bucket == name]
            if counts:
                buckets[name] = float(np.mean(counts))
        rows.append(PolicyMetrics(
            policy=policy,
            episodes=len(mine),
            viewpoints=mean_std(log.num_viewpoints for log in mine),
            success_rate=float(np.mean([log.success for log in mine])),
            planning_seconds=mean_std(log.planning_seconds for log in mine),
            cspace=mean_std(log.cspace for log in mine),
            workspace=mean_std(log.workspace for log in mine),
            coverage_curve=coverage_curve(mine, t_max),
            volume_buckets=buckets,
            chamfer=mean_std(chamfers) if chamfers else None,
        ))
    seeds = sorted({log.scene_seed for log in logs})
    return MetricsTable(rows, episodes, edges, seeds)


def run_benchmark(config: AnsenseConfig, n_scenes: Optional[int] = None,
                  policies: Optional[Sequence[str]] = None, seed: int = 0,
                  net: Optional[SurrogateNet] = None,
                  vpformer: Optional[VPFormer] = None,
                  specs: Optional[Sequence[SceneSpec]] = None) -> BenchmarkRun:
    """
    Run every policy on every evaluation scene.

    Args:
        config: Simulator configuration (episode settings apply to every run)
        n_scenes: Evaluation scenes (defaults to ``benchmark.n_scenes``)
        policies: Policies to compare (defaults to ``benchmark.policies``)
        seed: Benchmark seed selecting the evaluation scene block
        net: Trained surrogate, when the score model is the surrogate
        vpformer: Trained sequence model, when the vpformer policy is compared
        specs: Prebuilt scenes, overriding generation

    Returns:
        BenchmarkRun with the metrics table and every episode log
    """
    n_scenes = n_scenes or config.benchmark.n_scenes
    policies = [str(p).lower() for p in (policies or config.benchmark.policies)]
    if n_scenes < 1:
        raise ValueError("n_scenes must be at least 1")
    if specs is None:
        specs = evaluation_scenes(config, n_scenes, seed)
    if config.episode.score_model == "surrogate" and net is None:
        net = load_surrogate(config)

    logs: List[EpisodeLog] = []
    for policy_name in policies:
        for spec in specs:
            geometry = scene_geometry(spec, config.motion)
            score = create_score_model(config.episode.score_model, config, spec, geometry, net)
            policy = create_policy(policy_name, config, score, vpformer)
            logs.append(run_episode(spec, config, score, vpformer, policy))
        logger.info(f"Benchmarked {policy_name} on {len(specs)} scenes")
    return BenchmarkRun(summarize(logs, policies, config.episode.t_max), logs)


def run_ablation(kind: str, config: AnsenseConfig, n_scenes: Optional[int] = None,
                 policies: Optional[Sequence[str]] = None, seed: int = 0,
                 net: Optional[SurrogateNet] = None,
                 vpformer: Optional[VPFormer] = None) -> Dict[str, BenchmarkRun]:
    """
    Paired benchmarks with one episode flag on and off over the same scenes.

    Args:
        kind: "completion" or "refinement"

    Returns:
        {"on": BenchmarkRun, "off": BenchmarkRun}
    """
    flags = {"completion": "completion_on", "refinement": "refinement_on"}
    if kind not in flags:
        raise ValueError(f"Unsupported ablation: {kind} (expected one of {sorted(flags)})")
    if policies is None and kind == "refinement":
        policies = ["vpformer"]
    specs = evaluation_scenes(config, n_scenes or config.benchmark.n_scenes, seed)
    runs = {}
    for label, value in (("on", True), ("off", False)):
        variant = config.merged({"episode": {flags[kind]: value}})
        run = run_benchmark(variant, n_scenes, policies, seed, net, vpformer, specs)
        run.label = f"{kind}_{label}"
        runs[label] = run
    return runs
