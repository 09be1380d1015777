"""
The active sensing episode loop

Per step: build the collision model of the belief (releasing any object box
the camera already sits in), ask the policy for a ranked candidate batch, walk it until a path can be planned, execute with noise,
validate the executed pose, observe, register and update coverage.
"""

import logging
import time
from typing import Optional

from ..core.config import AnsenseConfig
from ..core.utils import STREAM_PLANNING, STREAM_SEGMENTATION, derive_rng, derive_seed
from ..exceptions import MonotonicityError, NoFeasibleViewpointError, PathPlanningError, SensorError
from ..models.episode import EpisodeLog, EpisodeStatus, StepRecord
from ..models.grid import BeliefGrid
from ..models.registration import BeliefState
from ..models.scene import SceneSpec
from ..motion.context import motion_context
from ..motion.execution import execute_with_noise, within_tolerance
from ..motion.metrics import path_distances
from ..motion.planner import plan_path
from ..registration.completion import evaluate_completion
from ..registration.pipeline import integrate_belief
from ..scene.coverage import coverage
from ..scene.geometry import scene_geometry
from ..score.base import BaseScoreModel
from ..score.features import featurize
from ..score.rollout import RolloutLabeler
from ..sensor.camera import apply_depth_noise, render_depth
from ..vpformer.model import VPFormer
from .policies import ViewpointPolicy, create_policy

logger = logging.getLogger(__name__)


def step_seed(seed: int, scene_seed: int, attempt: int) -> int:
    """Seed of one loop iteration (discarded iterations count)"""
    return derive_seed(seed, scene_seed, attempt)


def run_episode(spec: SceneSpec, config: AnsenseConfig, score: BaseScoreModel,
                vpformer: Optional[VPFormer] = None,
                policy: Optional[ViewpointPolicy] = None) -> EpisodeLog:
    """
    Run one active sensing episode on a scene.

    The loop continues while coverage is at most ``c_max``, fewer than ``t_max``
    viewpoints were accepted and fewer than ``discard_limit`` iterations were
    discarded. A discarded iteration (executed pose outside the tolerance or
    infeasible) leaves the belief and the camera pose unchanged.

    Args:
        spec: Ground-truth scene
        config: Simulator configuration; ``config.episode`` selects policy and flags
        score: Score model used by the policy
        vpformer: Trained sequence model, required by the vpformer policy
        policy: Prebuilt policy (overrides ``config.episode.policy``)

    Returns:
        EpisodeLog with status SUCCESS, STEP_LIMIT or PLANNING_FAILURE

    Raises:
        ScoreModelError: If the policy needs a model that was not supplied
        MonotonicityError: If registration ever lowered coverage
    """
    ep = config.episode
    motion = config.motion
    intr = config.sensor.intrinsics
    if isinstance(score, RolloutLabeler):
        score.attach(spec)
    policy = policy or create_policy(ep.policy, config, score, vpformer)
    geometry = scene_geometry(spec, motion)

    belief = BeliefState(BeliefGrid.unknown(spec.dims))
    current = geometry.start_viewpoint()
    c = coverage(belief.grid)
    log = EpisodeLog(spec.seed, policy.kind.value, current, spec.volume, c,
                     featurize(belief.grid, config.score.coarse_shape))
    attempt = 0
    discards = 0

    while c <= ep.c_max and log.num_viewpoints < ep.t_max and discards < ep.discard_limit:
        seed = step_seed(ep.seed, spec.seed, attempt)
        attempt += 1
        started = time.perf_counter()
        ctx = motion_context(belief, geometry, motion, config.sensor.mount_offset)
        model = ctx.model.release(current.position_array)
        try:
            candidates = policy.propose(belief, ctx, log, seed)
        except NoFeasibleViewpointError as e:
            logger.info(f"Scene {spec.seed}: no feasible candidates ({e})")
            log.status = EpisodeStatus.PLANNING_FAILURE
            break

        rng = derive_rng(seed, STREAM_PLANNING, 1)
        chosen, path, tried = None, None, 0
        for candidate in candidates[: ep.batch_size]:
            tried += 1
            try:
                path = plan_path(current, candidate.viewpoint, model, motion, rng)
                chosen = candidate
                break
            except PathPlanningError as e:
                logger.debug(f"Candidate {tried} not plannable: {e}")
        planning_seconds = time.perf_counter() - started
        if chosen is None:
            logger.info(f"Scene {spec.seed}: none of {tried} candidates plannable")
            log.status = EpisodeStatus.PLANNING_FAILURE
            break

        executed = execute_with_noise(path, ep.noise, seed)
        cspace, workspace = path_distances(path, motion.rotation_weight)
        snapshot = ep.record_snapshots
        record = StepRecord(
            t=log.num_viewpoints + 1, viewpoint=chosen.viewpoint, executed=executed,
            predicted=chosen.score, coverage=c, planning_seconds=planning_seconds,
            cspace=cspace, workspace=workspace, candidates_tried=tried, path=path,
            collision_grid=belief.grid if snapshot else None,
            collision_snapshot=model.to_snapshot() if snapshot else None,
            mpc_trace=policy.last_trace,
        )
        if not within_tolerance(executed, chosen.viewpoint, motion) or not model.is_free(executed):
            record.discarded = True
            discards += 1
            log.steps.append(record)
            logger.warning(f"Scene {spec.seed}: executed pose off target, step discarded ({discards})")
            continue

        try:
            obs = render_depth(spec, executed, intr, config.sensor.mount_offset)
        except SensorError as e:
            record.discarded = True
            discards += 1
            log.steps.append(record)
            logger.warning(f"Scene {spec.seed}: observation failed, step discarded ({e})")
            continue
        obs = apply_depth_noise(obs, config.sensor, seed)
        belief = integrate_belief(belief, obs, config.registration, intr,
                                  derive_seed(seed, STREAM_SEGMENTATION))
        c_next = coverage(belief.grid)
        if c_next < c:
            raise MonotonicityError(f"Coverage dropped from {c} to {c_next} on scene {spec.seed}")
        c = c_next
        record.coverage = c
        record.features = featurize(belief.grid, config.score.coarse_shape)
        if snapshot:
            record.observation = obs
            record.grid = belief.grid
        log.steps.append(record)
        current = executed
        logger.debug(f"Scene {spec.seed} step {record.t}: coverage {c:.4f} after {tried} candidates")

    if log.status is None:
        log.status = EpisodeStatus.SUCCESS if c > ep.c_max else EpisodeStatus.STEP_LIMIT
    log.chamfer = evaluate_completion(belief.store, belief.grid, spec, config.registration.volume_cap)
    if ep.record_snapshots:
        log.instance_points = {inst.id: inst.points for inst in belief.store}
    logger.info(f"Episode {log.policy} on scene {spec.seed}: {log.status.value}, "
                f"{log.num_viewpoints} viewpoints, coverage {log.final_coverage:.3f}")
    return log
