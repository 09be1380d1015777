"""Artifact storage and file codecs"""

from .base import BaseArtifactStore, StorageError
from .local import LocalArtifactStore

__all__ = [
    "BaseArtifactStore",
    "StorageError",
    "LocalArtifactStore",
]
