# Models package
from .store import ModelStore

__all__ = ['ModelStore']
