"""
Trained forest store for the scoring service.
"""
import logging
import os
import re
import threading
from typing import Dict, List, Optional

from forest.forest import RandomForestModel, load_model

logger = logging.getLogger(__name__)

MODEL_FILE = re.compile(r'^user_(\d+)\.json$')


class ModelStore:
    """Loads user_<id>.json forests from a directory on first use and caches them."""

    def __init__(self, model_dir: str):
        self.model_dir = model_dir
        self.lock = threading.RLock()  # Protects the cache
        self._models: Dict[int, RandomForestModel] = {}

    def path_for(self, user_id: int) -> str:
        return os.path.join(self.model_dir, f"user_{user_id}.json")

    def available(self) -> List[int]:
        """User ids with a cached or stored model, ascending."""
        with self.lock:
            ids = set(self._models)
        if os.path.isdir(self.model_dir):
            for name in os.listdir(self.model_dir):
                match = MODEL_FILE.match(name)
                if match:
                    ids.add(int(match.group(1)))
        return sorted(ids)

    def get(self, user_id: int) -> Optional[RandomForestModel]:
        """
        Model of one user, or None when no file exists.

        Raises:
            ForestError: When the file exists but is not a valid model
        """
        with self.lock:
            model = self._models.get(user_id)
            if model is not None:
                return model
            path = self.path_for(user_id)
            if not os.path.isfile(path):
                return None
            model = load_model(path)
            self._models[user_id] = model
            logger.info(f"Loaded model for user {user_id} ({len(model.trees)} trees)")
            return model

    def put(self, user_id: int, model: RandomForestModel):
        """Register an in-memory model (used by tests and embedding code)."""
        with self.lock:
            self._models[user_id] = model

    def clear(self):
        with self.lock:
            self._models.clear()
