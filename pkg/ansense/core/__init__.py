"""Core Ansense components"""

from .config import AnsenseConfig

__all__ = ["AnsenseConfig"]
