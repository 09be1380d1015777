"""Episode loop, benchmark protocol, artifact export and path audit"""

from .policies import ViewpointPolicy, create_policy, get_available_policies
from .episode import run_episode
from .benchmark import run_benchmark, run_ablation, summarize, evaluation_seeds
from .export import export_artifacts, export_artifacts_async
from .audit import AuditReport, audit_episode, audit_directory

__all__ = [
    "ViewpointPolicy", "create_policy", "get_available_policies",
    "run_episode",
    "run_benchmark", "run_ablation", "summarize", "evaluation_seeds",
    "export_artifacts", "export_artifacts_async",
    "AuditReport", "audit_episode", "audit_directory",
]
