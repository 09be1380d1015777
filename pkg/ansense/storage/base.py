"""
Base artifact store interface
"""

from abc import ABC, abstractmethod
from typing import List, Optional
import logging

logger = logging.getLogger(__name__)


class BaseArtifactStore(ABC):
    """Base class for run artifact backends; paths are relative to the store root"""

    @abstractmethod
    async def write_bytes(self, relative_path: str, data: bytes) -> str:
        """
        Write a binary artifact

        Args:
            relative_path: Path below the store root
            data: Content

        Returns:
            Absolute path of the written file
        """
        pass

    @abstractmethod
    async def read_bytes(self, relative_path: str) -> bytes:
        """
        Read a binary artifact

        Raises:
            StorageError: If the artifact is missing or unreadable
        """
        pass

    @abstractmethod
    async def exists(self, relative_path: str) -> bool:
        pass

    @abstractmethod
    async def list_artifacts(self, prefix: str = "") -> List[str]:
        """Relative paths of every artifact below ``prefix``, sorted"""
        pass

    async def write_text(self, relative_path: str, text: str) -> str:
        return await self.write_bytes(relative_path, text.encode("utf-8"))

    async def read_text(self, relative_path: str) -> str:
        return (await self.read_bytes(relative_path)).decode("utf-8")

    async def write_lines(self, relative_path: str, lines: List[str]) -> str:
        """Write newline-terminated records (JSONL, CSV)"""
        return await self.write_text(relative_path, "".join(f"{line}\n" for line in lines))


class StorageError(Exception):
    """Exception raised by artifact I/O, carrying the failing path"""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        super().__init__(message)
