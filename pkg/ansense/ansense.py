"""
Ansense - Active next-best-view sensing simulator

Facade wiring configuration to scene generation, score and sequence-model
training, episodes, benchmarks and the offline path audit.
"""

import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from .core.config import AnsenseConfig, VpformerConfig
from .exceptions import ScoreModelError
from .harness.audit import AuditReport, audit_directory_async
from .harness.benchmark import evaluation_scenes, run_ablation, run_benchmark
from .harness.export import export_artifacts_async
from .models.episode import BenchmarkRun
from .models.learning import ExpertDataset, ExpertTrajectory, TrainingCorpus, TrainingHistory, TrainingPair
from .models.scene import SceneSpec
from .scene.coverage import ground_truth_grid
from .scene.generation import generate_scene
from .scene.render import orthographic_views
from .score.dataset import generate_training_data
from .score.factory import load_surrogate
from .score.surrogate import SurrogateNet, load_parameters, net_parameters, train_surrogate
from .storage.base import BaseArtifactStore
from .storage.codecs import (
    encode_params, jsonl_lines, parse_jsonl, read_params_file, rgb_ppm, scene_from_dict, scene_to_dict
)
from .storage.local import LocalArtifactStore
from .utils.async_helpers import sync_wrapper
from .vpformer.expert import collect_expert_data
from .vpformer.model import VPFormer
from .vpformer.training import train_bc

logger = logging.getLogger(__name__)

SURROGATE_FILE = "surrogate.ansp"
VPFORMER_FILE = "vpformer.ansp"
PAIRS_FILE = "training_pairs.jsonl"
EXPERT_FILE = "expert.jsonl"


def _dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


class Ansense:
    """
    Ansense - Active Sensing Simulator API

    Every operation writes its artifacts below an output directory; the
    directory defaults to ``config.output_dir``.
    """

    def __init__(self, config: Optional[AnsenseConfig] = None):
        """
        Initialize the simulator

        Args:
            config: Simulator configuration (desk-scale defaults if None)
        """
        self.config = config or AnsenseConfig()
        self._surrogate: Optional[SurrogateNet] = None
        self._vpformer: Optional[VPFormer] = None
        logger.info(f"Ansense initialized: policy {self.config.episode.policy}, "
                    f"score model {self.config.episode.score_model}")

    def _store(self, out_dir: Optional[str]) -> BaseArtifactStore:
        return LocalArtifactStore(out_dir or self.config.output_dir)

    # Trained models

    @property
    def surrogate(self) -> Optional[SurrogateNet]:
        """Surrogate loaded from ``score.params_path`` when the score model needs it"""
        if self._surrogate is None and self.config.episode.score_model == "surrogate":
            self._surrogate = load_surrogate(self.config)
        return self._surrogate

    @property
    def vpformer(self) -> Optional[VPFormer]:
        """Sequence model loaded from ``vpformer.params_path`` when configured"""
        if self._vpformer is None and self.config.vpformer.params_path:
            self._vpformer = load_vpformer(self.config.vpformer.params_path)
        return self._vpformer

    def _needs_vpformer(self, policies: Sequence[str]) -> Optional[VPFormer]:
        if "vpformer" not in policies:
            return None
        if self.vpformer is None:
            raise ScoreModelError("The vpformer policy requires vpformer.params_path (run train-vpformer first)")
        return self.vpformer

    # Scenes

    async def scene_gen(self, n_scenes: int = 1, seed: int = 0,
                        out_dir: Optional[str] = None) -> List[SceneSpec]:
        """
        Generate evaluation-range scenes and write one JSON document each

        Returns:
            Generated scenes (failed seeds are skipped)
        """
        store = self._store(out_dir)
        specs = evaluation_scenes(self.config, n_scenes, seed)
        for spec in specs:
            await store.write_text(f"scenes/scene_{spec.seed}.json", _dumps(scene_to_dict(spec)))
        logger.info(f"Wrote {len(specs)} scenes")
        return specs

    async def render(self, scene_path: Optional[str] = None, seed: Optional[int] = None,
                     out_dir: Optional[str] = None) -> Dict[str, str]:
        """
        Orthographic renders of a scene's ground-truth occupancy

        Args:
            scene_path: Scene JSON written by ``scene_gen``
            seed: Scene seed to generate when no file is given

        Returns:
            {axis: written path}
        """
        store = self._store(out_dir)
        if scene_path:
            spec = scene_from_dict(json.loads(await _read_text(scene_path)))
        else:
            spec = generate_scene(self.config.scene, 0 if seed is None else seed)
        written = {}
        for axis, image in orthographic_views(ground_truth_grid(spec)).items():
            written[axis] = await store.write_bytes(f"render_{spec.seed}_{axis}.ppm", rgb_ppm(image))
        return written

    # Score model

    async def gen_data(self, n_scenes: Optional[int] = None, seed: Optional[int] = None,
                       out_dir: Optional[str] = None) -> TrainingCorpus:
        """Roll out random sequences and write labelled pairs to ``training_pairs.jsonl``"""
        corpus = generate_training_data(self.config, n_scenes=n_scenes, seed=seed)
        records = [dict(p.to_dict(), split="train") for p in corpus.train]
        records += [dict(p.to_dict(), split="eval") for p in corpus.eval]
        store = self._store(out_dir)
        await store.write_lines(PAIRS_FILE, jsonl_lines(records))
        await store.write_text("training_scenes.json", _dumps(corpus.scene_seeds))
        return corpus

    async def train_score(self, data_path: str, out_dir: Optional[str] = None) -> TrainingHistory:
        """
        Train the surrogate on a pairs file and write ``surrogate.ansp``

        Args:
            data_path: JSONL written by ``gen_data``
        """
        records = parse_jsonl(await _read_text(data_path))
        train = [TrainingPair.from_dict(r) for r in records if r.get("split", "train") == "train"]
        held_out = [TrainingPair.from_dict(r) for r in records if r.get("split") == "eval"]
        net, history = train_surrogate(train, held_out or None, self.config.score, self.config.training)
        store = self._store(out_dir)
        await store.write_text("surrogate_history.json", _dumps(history.to_dict()))
        meta = {"kind": "surrogate", "score": asdict(self.config.score), "best_epoch": history.best_epoch}
        params_path = await store.write_bytes(SURROGATE_FILE, encode_params(net_parameters(net), meta))
        self._surrogate = net
        logger.info(f"Surrogate parameters written to {params_path}")
        return history

    # Sequence model

    async def collect_expert(self, n_scenes: Optional[int] = None, seed: Optional[int] = None,
                             out_dir: Optional[str] = None) -> ExpertDataset:
        """Record bilevel MPC trajectories into ``expert.jsonl``"""
        dataset = collect_expert_data(self.config, n_scenes, seed, self.surrogate)
        store = self._store(out_dir)
        await store.write_lines(EXPERT_FILE, jsonl_lines(t.to_dict() for t in dataset.trajectories))
        return dataset

    async def train_vpformer(self, data_path: str, out_dir: Optional[str] = None) -> TrainingHistory:
        """
        Behaviour-clone the sequence model on an expert file and write ``vpformer.ansp``

        Args:
            data_path: JSONL written by ``collect_expert``
        """
        records = parse_jsonl(await _read_text(data_path))
        dataset = ExpertDataset([ExpertTrajectory.from_dict(r) for r in records])
        model, history = train_bc(dataset, self.config.vpformer, self.config.training)
        store = self._store(out_dir)
        await store.write_text("vpformer_history.json", _dumps(history.to_dict()))
        vp = asdict(self.config.vpformer)
        vp.pop("params_path")
        meta = {"kind": "vpformer", "feature_size": model.feature_size, "vpformer": vp,
                "best_epoch": history.best_epoch}
        params_path = await store.write_bytes(VPFORMER_FILE, encode_params(net_parameters(model), meta))
        self._vpformer = model
        logger.info(f"Sequence model parameters written to {params_path}")
        return history

    # Episodes and benchmarks

    async def run(self, n_scenes: int = 1, seed: int = 0, out_dir: Optional[str] = None) -> BenchmarkRun:
        """Run the configured policy on evaluation scenes and export every artifact"""
        policies = [self.config.episode.policy]
        run = run_benchmark(self.config, n_scenes, policies, seed, self.surrogate,
                            self._needs_vpformer(policies))
        await export_artifacts_async(run.logs, self._store(out_dir), run.table,
                                     self.config.benchmark.with_timing)
        return run

    async def benchmark(self, n_scenes: Optional[int] = None, seed: int = 0,
                        policies: Optional[Sequence[str]] = None, ablation: Optional[str] = None,
                        out_dir: Optional[str] = None) -> Dict[str, BenchmarkRun]:
        """
        Compare policies on the same evaluation scenes, or run a paired ablation

        Args:
            ablation: "completion" or "refinement"; results go to ``<kind>_on/`` and ``<kind>_off/``

        Returns:
            {label: BenchmarkRun}; the label is "benchmark" without an ablation
        """
        if ablation == "refinement" and policies is None:
            policies = ["vpformer"]
        policies = [str(p).lower() for p in (policies or self.config.benchmark.policies)]
        vpformer = self._needs_vpformer(policies)
        if ablation:
            runs = run_ablation(ablation, self.config, n_scenes, policies, seed, self.surrogate, vpformer)
            results = {run.label: run for run in runs.values()}
        else:
            run = run_benchmark(self.config, n_scenes, policies, seed, self.surrogate, vpformer)
            run.label = "benchmark"
            results = {"benchmark": run}

        base = Path(out_dir or self.config.output_dir)
        for label, run in results.items():
            store = LocalArtifactStore(str(base / label) if ablation else str(base))
            await export_artifacts_async(run.logs, store, run.table, self.config.benchmark.with_timing)
        return results

    async def validate_paths(self, out_dir: Optional[str] = None) -> AuditReport:
        """Audit every exported path against its recorded collision snapshot"""
        return await audit_directory_async(self._store(out_dir), self.config.motion)

    # Synchronous API

    def scene_gen_sync(self, n_scenes: int = 1, seed: int = 0, out_dir: Optional[str] = None) -> List[SceneSpec]:
        return sync_wrapper(self.scene_gen(n_scenes, seed, out_dir))

    def render_sync(self, scene_path: Optional[str] = None, seed: Optional[int] = None,
                    out_dir: Optional[str] = None) -> Dict[str, str]:
        return sync_wrapper(self.render(scene_path, seed, out_dir))

    def gen_data_sync(self, n_scenes: Optional[int] = None, seed: Optional[int] = None,
                      out_dir: Optional[str] = None) -> TrainingCorpus:
        return sync_wrapper(self.gen_data(n_scenes, seed, out_dir))

    def train_score_sync(self, data_path: str, out_dir: Optional[str] = None) -> TrainingHistory:
        return sync_wrapper(self.train_score(data_path, out_dir))

    def collect_expert_sync(self, n_scenes: Optional[int] = None, seed: Optional[int] = None,
                            out_dir: Optional[str] = None) -> ExpertDataset:
        return sync_wrapper(self.collect_expert(n_scenes, seed, out_dir))

    def train_vpformer_sync(self, data_path: str, out_dir: Optional[str] = None) -> TrainingHistory:
        return sync_wrapper(self.train_vpformer(data_path, out_dir))

    def run_sync(self, n_scenes: int = 1, seed: int = 0, out_dir: Optional[str] = None) -> BenchmarkRun:
        return sync_wrapper(self.run(n_scenes, seed, out_dir))

    def benchmark_sync(self, n_scenes: Optional[int] = None, seed: int = 0,
                       policies: Optional[Sequence[str]] = None, ablation: Optional[str] = None,
                       out_dir: Optional[str] = None) -> Dict[str, BenchmarkRun]:
        return sync_wrapper(self.benchmark(n_scenes, seed, policies, ablation, out_dir))

    def validate_paths_sync(self, out_dir: Optional[str] = None) -> AuditReport:
        return sync_wrapper(self.validate_paths(out_dir))


async def _read_text(path: Union[str, Path]) -> str:
    path = Path(path)
    return await LocalArtifactStore(str(path.parent)).read_text(path.name)


def load_vpformer(path: str) -> VPFormer:
    """Rebuild a sequence model from a parameter file written by ``train_vpformer``"""
    params, meta = read_params_file(path)
    if meta.get("kind") != "vpformer" or "feature_size" not in meta:
        raise ScoreModelError(f"{path} does not hold sequence model parameters")
    model = VPFormer(VpformerConfig(**meta["vpformer"]), int(meta["feature_size"]))
    load_parameters(model, params)
    model.eval()
    return model


# Convenience factory functions

def load_config(config_path: Optional[str] = None) -> AnsenseConfig:
    """
    Configuration from a JSON document, or from ANSENSE_* variables when no file is given

    Raises:
        ValueError: On unknown keys or invalid values
        OSError: If the file cannot be read
    """
    if not config_path:
        return AnsenseConfig.from_env()
    with open(config_path, "r", encoding="utf-8") as f:
        return AnsenseConfig.from_dict(json.load(f))


def create_ansense(config_path: Optional[str] = None,
                   overrides: Optional[Dict[str, Any]] = None) -> Ansense:
    """
    Create the simulator from a config file plus per-section overrides

    Args:
        config_path: JSON document mirroring AnsenseConfig
        overrides: {section: {field: value}}; None values are ignored

    Returns:
        Configured Ansense
    """
    config = load_config(config_path)
    if overrides:
        config = config.merged(overrides)
    return Ansense(config)
