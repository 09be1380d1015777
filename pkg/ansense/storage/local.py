"""
Local file system artifact store
"""

import asyncio
import logging
from pathlib import Path
from typing import List

import aiofiles
import aiofiles.os

from .base import BaseArtifactStore, StorageError

logger = logging.getLogger(__name__)


class LocalArtifactStore(BaseArtifactStore):
    """Artifacts as plain files below a root directory"""

    def __init__(self, root: str):
        self.root = Path(root).resolve()
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise StorageError(f"Cannot create output directory: {e}", str(self.root)) from e
        logger.debug(f"Initialized artifact store at: {self.root}")

    def _path(self, relative_path: str) -> Path:
        path = (self.root / relative_path).resolve()
        if self.root not in path.parents and path != self.root:
            raise StorageError("Artifact path escapes the store root", relative_path)
        return path

    async def write_bytes(self, relative_path: str, data: bytes) -> str:
        path = self._path(relative_path)
        try:
            await aiofiles.os.makedirs(path.parent, exist_ok=True)
            async with aiofiles.open(path, "wb") as f:
                await f.write(data)
        except OSError as e:
            logger.error(f"Failed to write {path}: {e}")
            raise StorageError(f"Failed to write artifact: {e}", str(path)) from e
        return str(path)

    async def read_bytes(self, relative_path: str) -> bytes:
        path = self._path(relative_path)
        try:
            async with aiofiles.open(path, "rb") as f:
                return await f.read()
        except OSError as e:
            raise StorageError(f"Failed to read artifact: {e}", str(path)) from e

    async def exists(self, relative_path: str) -> bool:
        return await aiofiles.os.path.isfile(self._path(relative_path))

    async def list_artifacts(self, prefix: str = "") -> List[str]:
        base = self._path(prefix) if prefix else self.root
        if not base.exists():
            return []
        files = await asyncio.get_running_loop().run_in_executor(
            None, lambda: [p for p in base.rglob("*") if p.is_file()])
        return sorted(p.relative_to(self.root).as_posix() for p in files)
