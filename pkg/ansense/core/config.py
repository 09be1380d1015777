"""
Ansense Simulator Configuration

Dataclass configuration for scene randomisation, sensing, registration, planning,
learning and the episode/benchmark harness. Defaults are the desk-scale values.
"""

import os
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, Optional, Tuple

from ..models.camera import CameraIntrinsics

POLICY_NAMES = ("random", "random_guided", "bilevel_mpc", "vpformer")
SCORE_MODEL_NAMES = ("rollout", "heuristic", "surrogate")
FACE_NAMES = ("-x", "+x", "-y", "+y", "-z", "+z")
SHAPE_NAMES = ("box", "cylinder", "sphere", "l_prism")

# Rigid offset (body frame, m) from the planned body pose to the optical centre
# of the wrist-mounted camera.
ARM_CAMERA_MOUNT_OFFSET = (0.11, 0.0, 0.07)


def _range(value, name: str, minimum: Optional[float] = None) -> Tuple[float, float]:
    lo, hi = (float(v) for v in value)
    if lo > hi:
        raise ValueError(f"{name} range must be ordered (lo <= hi), got [{lo}, {hi}]")
    if minimum is not None and lo < minimum:
        raise ValueError(f"{name} range must start at or above {minimum}, got {lo}")
    return lo, hi


def _build(cls, data: Optional[Dict[str, Any]]):
    """Instantiate a config dataclass, rejecting unknown keys"""
    if data is None:
        return cls()
    if isinstance(data, cls):
        return data
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"Unknown {cls.__name__} keys: {sorted(unknown)}")
    return cls(**data)


@dataclass
class DomainRandomizationConfig:
    """Ranges for procedural cabinet scenes"""

    extent_x: Tuple[float, float] = (0.5, 1.0)   # meters, depth through the opening
    extent_y: Tuple[float, float] = (1.1, 1.5)
    extent_z: Tuple[float, float] = (0.3, 0.7)
    cabinet_height: Tuple[float, float] = (0.05, 0.2)
    base_offset_x: Tuple[float, float] = (-0.5, -0.1)  # outward from the opening
    base_offset_y: Tuple[float, float] = (-0.3, 0.3)
    object_count: Tuple[int, int] = (3, 10)
    object_size: Tuple[float, float] = (0.05, 0.25)
    shapes: Tuple[str, ...] = SHAPE_NAMES
    opening_faces: Tuple[str, ...] = ("-x",)
    resolution: float = 0.025
    cabinet_offset: float = 0.3     # distance from the robot frame to the opening
    placement_retries: int = 50

    def __post_init__(self):
        """Validate and normalise ranges"""
        self.extent_x = _range(self.extent_x, "extent_x", 0.0)
        self.extent_y = _range(self.extent_y, "extent_y", 0.0)
        self.extent_z = _range(self.extent_z, "extent_z", 0.0)
        self.cabinet_height = _range(self.cabinet_height, "cabinet_height")
        self.base_offset_x = _range(self.base_offset_x, "base_offset_x")
        self.base_offset_y = _range(self.base_offset_y, "base_offset_y")
        self.object_size = _range(self.object_size, "object_size", 0.0)
        lo, hi = (int(v) for v in self.object_count)
        if lo > hi or lo < 0:
            raise ValueError(f"object_count range must be ordered and non-negative, got [{lo}, {hi}]")
        self.object_count = (lo, hi)
        self.shapes = tuple(self.shapes)
        self.opening_faces = tuple(self.opening_faces)
        if not self.shapes or any(s not in SHAPE_NAMES for s in self.shapes):
            raise ValueError(f"shapes must be a non-empty subset of {SHAPE_NAMES}")
        if not self.opening_faces or any(f not in FACE_NAMES for f in self.opening_faces):
            raise ValueError(f"opening_faces must be a non-empty subset of {FACE_NAMES}")
        if self.resolution <= 0:
            raise ValueError("Voxel resolution must be positive")
        if self.extent_x[0] < 3 * self.resolution or self.extent_y[0] < 3 * self.resolution \
                or self.extent_z[0] < 3 * self.resolution:
            raise ValueError("Scene extents must span at least three voxels")
        if self.placement_retries < 1:
            raise ValueError("placement_retries must be at least 1")


@dataclass
class SensorConfig:
    """Simulated depth camera"""

    hfov: float = 70.25
    width: int = 80
    height: int = 45
    max_range: float = 2.0
    mount_offset: Tuple[float, float, float] = ARM_CAMERA_MOUNT_OFFSET
    depth_noise: float = 0.0        # Gaussian sigma, meters
    edge_dropout: float = 0.0       # probability of dropping a depth-edge pixel

    def __post_init__(self):
        self.mount_offset = tuple(float(v) for v in self.mount_offset)
        if len(self.mount_offset) != 3:
            raise ValueError("mount_offset must have three components")
        if self.depth_noise < 0:
            raise ValueError("depth_noise must be non-negative")
        if not 0.0 <= self.edge_dropout < 1.0:
            raise ValueError("edge_dropout must be in [0, 1)")
        # raises ValueError on bad intrinsics
        self.intrinsics

    @property
    def intrinsics(self) -> CameraIntrinsics:
        return CameraIntrinsics(hfov=self.hfov, width=self.width, height=self.height,
                                max_range=self.max_range)

    @property
    def noise_enabled(self) -> bool:
        return self.depth_noise > 0 or self.edge_dropout > 0


@dataclass
class RegistrationConfig:
    """Scene registration"""

    eta: float = 0.05               # instance merging threshold, meters
    miss_prob: float = 0.0          # segmentation miss probability per instance
    completion_on: bool = True
    volume_cap: float = 0.016       # m^3, largest procedural object volume
    accelerated: bool = False       # KD-tree nearest-neighbour distances

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("Merging threshold eta must be positive")
        if not 0.0 <= self.miss_prob < 1.0:
            raise ValueError("miss_prob must be in [0, 1)")
        if self.volume_cap <= 0:
            raise ValueError("volume_cap must be positive")


@dataclass
class MotionConfig:
    """Free-flying camera body, feasibility and path planning"""

    body_radius: float = 0.04
    reach_radius: float = 1.0
    staging_depth: float = 0.6
    rrt_budget: int = 5000
    rrt_step: float = 0.05
    goal_bias: float = 0.1
    interpolation_step: Optional[float] = None  # defaults to resolution / 2
    rotation_weight: float = 0.1    # lambda, meters per radian
    position_tolerance: float = 0.02
    angle_tolerance_deg: float = 5.0
    attempt_factor: int = 20        # sampling attempt budget = n * attempt_factor

    def __post_init__(self):
        if self.body_radius < 0:
            raise ValueError("body_radius must be non-negative")
        if self.reach_radius <= 0 or self.staging_depth <= 0:
            raise ValueError("reach_radius and staging_depth must be positive")
        if self.rrt_budget < 1 or self.rrt_step <= 0:
            raise ValueError("RRT budget and step must be positive")
        if not 0.0 <= self.goal_bias <= 1.0:
            raise ValueError("goal_bias must be in [0, 1]")
        if self.interpolation_step is not None and self.interpolation_step <= 0:
            raise ValueError("interpolation_step must be positive")
        if self.attempt_factor < 1:
            raise ValueError("attempt_factor must be at least 1")


@dataclass
class ExecutionNoiseConfig:
    """Execution noise applied to the final path waypoint"""

    sigma_pos: float = 0.0          # meters
    sigma_ang: float = 0.0          # radians

    def __post_init__(self):
        if self.sigma_pos < 0 or self.sigma_ang < 0:
            raise ValueError("Execution noise sigmas must be non-negative")


@dataclass
class MpcParams:
    """Bilevel MPC (cross-entropy) hyperparameters"""

    n_iter: int = 5
    n_mpc: int = 1000
    elite_schedule: Tuple[int, ...] = (800, 500, 200, 100, 50)
    sigma0: Tuple[float, ...] = (0.1,) * 7
    stage1_samples: int = 1000
    sigma_floor: float = 1e-3
    retain_best: bool = False       # carry the best viewpoint so far into each round

    def __post_init__(self):
        self.elite_schedule = tuple(int(e) for e in self.elite_schedule)
        sigma = tuple(float(s) for s in (self.sigma0 if hasattr(self.sigma0, "__len__") else (self.sigma0,) * 7))
        self.sigma0 = sigma
        if self.n_iter < 1 or self.n_mpc < 1 or self.stage1_samples < 1:
            raise ValueError("n_iter, n_mpc and stage1_samples must be at least 1")
        if len(self.elite_schedule) != self.n_iter:
            raise ValueError(f"elite_schedule length {len(self.elite_schedule)} != n_iter {self.n_iter}")
        if any(e < 1 or e > self.n_mpc for e in self.elite_schedule):
            raise ValueError("Every elite count must be in [1, n_mpc]")
        if len(self.sigma0) != 7 or any(s <= 0 for s in self.sigma0):
            raise ValueError("sigma0 must be a positive 7-vector")
        if self.sigma_floor <= 0:
            raise ValueError("sigma_floor must be positive")

    @classmethod
    def small(cls, n_mpc: int = 40, stage1_samples: int = 40) -> 'MpcParams':
        """Scaled-down schedule for quick runs and tests"""
        schedule = tuple(max(2, round(n_mpc * f)) for f in (0.8, 0.5, 0.2, 0.1, 0.05))
        return cls(n_mpc=n_mpc, elite_schedule=schedule, stage1_samples=stage1_samples)


@dataclass
class ScoreConfig:
    """Score model featurisation and surrogate architecture"""

    coarse_shape: Tuple[int, int, int] = (5, 8, 4)
    grid_hidden: Tuple[int, int] = (128, 64)
    view_hidden: int = 64
    params_path: Optional[str] = None

    def __post_init__(self):
        self.coarse_shape = tuple(int(v) for v in self.coarse_shape)
        self.grid_hidden = tuple(int(v) for v in self.grid_hidden)
        if len(self.coarse_shape) != 3 or min(self.coarse_shape) < 1:
            raise ValueError("coarse_shape must be three positive integers")
        if len(self.grid_hidden) != 2 or min(self.grid_hidden) < 1 or self.view_hidden < 1:
            raise ValueError("Hidden layer sizes must be positive")

    @property
    def feature_size(self) -> int:
        kx, ky, kz = self.coarse_shape
        return 3 * kx * ky * kz


@dataclass
class TrainingConfig:
    """Data generation and optimisation settings shared by both learners"""

    learning_rate: float = 5e-4
    epochs: int = 100
    batch_size: int = 64
    eval_fraction: float = 0.2
    seed: int = 0
    data_scenes: int = 60
    sequences_per_scene: int = 4
    sequence_length: int = 5
    expert_scenes: int = 30

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be at least 1")
        if not 0.0 < self.eval_fraction < 1.0:
            raise ValueError("eval_fraction must be in (0, 1)")
        if min(self.data_scenes, self.sequences_per_scene, self.sequence_length, self.expert_scenes) < 1:
            raise ValueError("Data generation counts must be at least 1")


@dataclass
class VpformerConfig:
    """Masked-attention sequence planner"""

    width: int = 256
    n_heads: int = 8
    n_layers: int = 2
    ffn_width: int = 512
    max_len: int = 8
    model_steps: int = 2            # model proposals before reverting to stage-1
    refine_sigma: float = 0.05
    refine_samples: int = 50
    params_path: Optional[str] = None

    def __post_init__(self):
        if self.n_heads < 1 or self.width % self.n_heads != 0:
            raise ValueError("width must be divisible by n_heads")
        if self.width < 8 or self.n_layers < 1 or self.ffn_width < 1:
            raise ValueError("width, n_layers and ffn_width must be positive")
        if self.max_len < 2:
            raise ValueError("max_len must be at least 2")
        if self.model_steps < 0 or self.refine_samples < 1 or self.refine_sigma < 0:
            raise ValueError("Invalid refinement settings")

    @property
    def head_dim(self) -> int:
        return self.width // self.n_heads


@dataclass
class EpisodeConfig:
    """One active-sensing episode"""

    policy: str = "bilevel_mpc"
    score_model: str = "heuristic"
    c_max: float = 0.85
    t_max: int = 15
    completion_on: bool = True
    refinement_on: bool = True
    noise: ExecutionNoiseConfig = field(default_factory=ExecutionNoiseConfig)
    seed: int = 0
    batch_size: int = 50            # candidates walked per step (B)
    guided_batch: int = 1000
    max_discards: Optional[int] = None   # defaults to t_max
    record_snapshots: bool = False

    def __post_init__(self):
        if isinstance(self.noise, dict):
            self.noise = _build(ExecutionNoiseConfig, self.noise)
        self.policy = str(self.policy).lower()
        self.score_model = str(self.score_model).lower()
        if self.policy not in POLICY_NAMES:
            raise ValueError(f"Unsupported policy: {self.policy} (expected one of {POLICY_NAMES})")
        if self.score_model not in SCORE_MODEL_NAMES:
            raise ValueError(f"Unsupported score model: {self.score_model} (expected one of {SCORE_MODEL_NAMES})")
        if not 0.0 <= self.c_max <= 1.0:
            raise ValueError("c_max must be in [0, 1]")
        if self.t_max < 1:
            raise ValueError("t_max must be at least 1")
        if self.batch_size < 1 or self.guided_batch < 1:
            raise ValueError("Candidate batch sizes must be at least 1")
        if self.max_discards is not None and self.max_discards < 0:
            raise ValueError("max_discards must be non-negative")

    @property
    def discard_limit(self) -> int:
        return self.t_max if self.max_discards is None else self.max_discards


@dataclass
class BenchmarkConfig:
    """Benchmark protocol"""

    n_scenes: int = 30
    policies: Tuple[str, ...] = ("random", "random_guided", "bilevel_mpc")
    eval_seed_base: int = 1_000_000
    train_seed_limit: int = 1_000_000   # training scene seeds stay below this
    with_timing: bool = False

    def __post_init__(self):
        self.policies = tuple(str(p).lower() for p in self.policies)
        if self.n_scenes < 1:
            raise ValueError("n_scenes must be at least 1")
        if not self.policies or any(p not in POLICY_NAMES for p in self.policies):
            raise ValueError(f"policies must be a non-empty subset of {POLICY_NAMES}")
        if self.eval_seed_base < self.train_seed_limit:
            raise ValueError("Evaluation seeds must not overlap the training seed range")


@dataclass
class AnsenseConfig:
    """Ansense Simulator Configuration

    Aggregates every component config; one JSON document mirrors this layout.
    """

    scene: DomainRandomizationConfig = field(default_factory=DomainRandomizationConfig)
    sensor: SensorConfig = field(default_factory=SensorConfig)
    registration: RegistrationConfig = field(default_factory=RegistrationConfig)
    motion: MotionConfig = field(default_factory=MotionConfig)
    mpc: MpcParams = field(default_factory=MpcParams)
    score: ScoreConfig = field(default_factory=ScoreConfig)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    vpformer: VpformerConfig = field(default_factory=VpformerConfig)
    episode: EpisodeConfig = field(default_factory=EpisodeConfig)
    benchmark: BenchmarkConfig = field(default_factory=BenchmarkConfig)

    # Logging and output
    log_level: str = "INFO"
    output_dir: str = "./ansense_runs"

    _SECTIONS = {
        "scene": DomainRandomizationConfig,
        "sensor": SensorConfig,
        "registration": RegistrationConfig,
        "motion": MotionConfig,
        "mpc": MpcParams,
        "score": ScoreConfig,
        "training": TrainingConfig,
        "vpformer": VpformerConfig,
        "episode": EpisodeConfig,
        "benchmark": BenchmarkConfig,
    }

    def __post_init__(self):
        """Validate the aggregate configuration"""
        self.log_level = str(self.log_level).upper()
        if self.log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"Unsupported log level: {self.log_level}")
        # The episode flag is authoritative for registration completion.
        self.registration.completion_on = self.episode.completion_on

    @classmethod
    def from_dict(cls, config_dict: Dict[str, Any]) -> 'AnsenseConfig':
        """Create configuration from a (possibly partial) nested dictionary"""
        kwargs: Dict[str, Any] = {}
        for key, value in config_dict.items():
            if key in cls._SECTIONS:
                kwargs[key] = _build(cls._SECTIONS[key], value)
            elif key in ("log_level", "output_dir"):
                kwargs[key] = value
            else:
                raise ValueError(f"Unknown configuration key: {key}")
        return cls(**kwargs)

    @classmethod
    def from_env(cls) -> 'AnsenseConfig':
        """Create configuration from environment"""
        config_dict: Dict[str, Any] = {}
        episode: Dict[str, Any] = {}

        env_mapping = {
            'ANSENSE_LOG_LEVEL': ('', 'log_level'),
            'ANSENSE_OUTPUT_DIR': ('', 'output_dir'),
            'ANSENSE_SEED': ('episode', 'seed'),
            'ANSENSE_POLICY': ('episode', 'policy'),
            'ANSENSE_SCORE_MODEL': ('episode', 'score_model'),
            'ANSENSE_C_MAX': ('episode', 'c_max'),
            'ANSENSE_T_MAX': ('episode', 't_max'),
        }

        for env_var, (section, config_field) in env_mapping.items():
            value = os.getenv(env_var)
            if value is None:
                continue
            if config_field in ('seed', 't_max'):
                converted: Any = int(value)
            elif config_field == 'c_max':
                converted = float(value)
            else:
                converted = value
            if section == 'episode':
                episode[config_field] = converted
            else:
                config_dict[config_field] = converted

        if episode:
            config_dict['episode'] = episode
        return cls.from_dict(config_dict)

    def to_dict(self) -> Dict[str, Any]:
        """Plain-JSON view of the configuration"""
        data = {name: asdict(getattr(self, name)) for name in self._SECTIONS}
        data["log_level"] = self.log_level
        data["output_dir"] = self.output_dir
        return data

    def merged(self, overrides: Dict[str, Dict[str, Any]]) -> 'AnsenseConfig':
        """Return a copy with per-section overrides applied (CLI flags win)"""
        data = self.to_dict()
        for section, values in overrides.items():
            if section in ("log_level", "output_dir"):
                if values is not None:
                    data[section] = values
                continue
            for key, value in values.items():
                if value is None:
                    continue
                if key == "noise" and isinstance(value, dict):
                    data[section]["noise"].update({k: v for k, v in value.items() if v is not None})
                else:
                    data[section][key] = value
        return AnsenseConfig.from_dict(data)
