"""
Kinematic series and the 31-component feature vector of a mouse action.

Component order (stable, used for every serialized matrix):
    {vx, vy, v, a, jerk, omega} x {mean, std, min, max}
    duration, path_length, endpoint_distance, straightness,
    sum_of_angles, max_deviation, direction
"""
import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from io_utils import atomic_open

from .action import MouseAction

MIN_DT = 1e-4  # seconds

SERIES_NAMES = ('vx', 'vy', 'v', 'a', 'jerk', 'omega')
AGGREGATES = ('mean', 'std', 'min', 'max')
SHAPE_NAMES = (
    'duration',
    'path_length',
    'endpoint_distance',
    'straightness',
    'sum_of_angles',
    'max_deviation',
    'direction',
)
FEATURE_NAMES = tuple(f"{s}_{a}" for s in SERIES_NAMES for a in AGGREGATES) + SHAPE_NAMES
FEATURE_DIMENSION = len(FEATURE_NAMES)
META_COLUMNS = ('user_id', 'label', 'ordinal')


def wrap_angle(angle):
    """Wrap radians into (-pi, pi]."""
    wrapped = np.mod(np.asarray(angle, dtype=float) + math.pi, 2 * math.pi) - math.pi
    return np.where(wrapped <= -math.pi, math.pi, wrapped)


@dataclass(frozen=True)
class KinematicSeries:
    dt: np.ndarray
    dx: np.ndarray
    dy: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    v: np.ndarray
    theta: np.ndarray
    dtheta: np.ndarray
    omega: np.ndarray
    a: np.ndarray
    jerk: np.ndarray


class FeatureVector:
    """Fixed-width numeric summary of one action."""

    __slots__ = ('_values',)

    def __init__(self, values):
        values = np.array(values, dtype=float)
        if values.shape != (FEATURE_DIMENSION,):
            raise ValueError(f"Expected {FEATURE_DIMENSION} components, got shape {values.shape}")
        values.setflags(write=False)
        self._values = values

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __getitem__(self, key: Union[int, str]) -> float:
        if isinstance(key, str):
            key = FEATURE_NAMES.index(key)
        return float(self._values[key])

    def __len__(self):
        return FEATURE_DIMENSION

    def __iter__(self):
        return iter(self._values.tolist())

    def __eq__(self, other):
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return bool(np.array_equal(self._values, other._values))

    def __hash__(self):
        return hash(self._values.tobytes())

    def to_dict(self) -> dict:
        return dict(zip(FEATURE_NAMES, self._values.tolist()))

    def __repr__(self):
        return f"FeatureVector(v_mean={self['v_mean']:.3f}, duration={self['duration']:.4f}, ...)"


def compute_kinematics(action: MouseAction) -> KinematicSeries:
    """Velocity, direction and their derivatives between consecutive events."""
    events = action.events
    t0 = events[0].timestamp
    t = np.array([e.timestamp - t0 for e in events], dtype=float)
    x = np.array([e.x - events[0].x for e in events], dtype=float)
    y = np.array([e.y - events[0].y for e in events], dtype=float)

    dt = np.maximum(np.diff(t), MIN_DT)
    dx = np.diff(x)
    dy = np.diff(y)
    vx = dx / dt
    vy = dy / dt
    v = np.hypot(vx, vy)

    moving = (dx != 0) | (dy != 0)
    theta = np.where(moving, np.arctan2(dy, dx), 0.0)
    theta = np.where(theta <= -math.pi, math.pi, theta)
    dtheta = wrap_angle(np.diff(theta))
    omega = dtheta / dt[1:]
    a = np.diff(v) / dt[1:]
    jerk = np.diff(a) / dt[2:]

    return KinematicSeries(dt=dt, dx=dx, dy=dy, vx=vx, vy=vy, v=v, theta=theta,
                           dtheta=dtheta, omega=omega, a=a, jerk=jerk)


def _aggregate(series: np.ndarray) -> Tuple[float, float, float, float]:
    if series.size == 0:
        return 0.0, 0.0, 0.0, 0.0
    return float(series.mean()), float(series.std()), float(series.min()), float(series.max())


def _max_deviation(x: np.ndarray, y: np.ndarray) -> float:
    interior_x, interior_y = x[1:-1], y[1:-1]
    if interior_x.size == 0:
        return 0.0
    ex, ey = x[-1], y[-1]
    chord = math.hypot(ex, ey)
    if chord == 0:
        return float(np.hypot(interior_x, interior_y).max())
    return float((np.abs(ex * interior_y - ey * interior_x) / chord).max())


def extract_features(action: MouseAction) -> FeatureVector:
    """Compute the 31-component vector of one action."""
    series = compute_kinematics(action)
    values: List[float] = []
    for name in SERIES_NAMES:
        values.extend(_aggregate(getattr(series, name)))

    events = action.events
    x = np.array([e.x - events[0].x for e in events], dtype=float)
    y = np.array([e.y - events[0].y for e in events], dtype=float)

    duration = events[-1].timestamp - events[0].timestamp
    path_length = float(np.hypot(series.dx, series.dy).sum())
    endpoint_distance = math.hypot(x[-1], y[-1])
    straightness = endpoint_distance / path_length if path_length > 0 else 0.0
    straightness = min(straightness, 1.0)
    sum_of_angles = float(series.dtheta.sum())
    direction = math.atan2(y[-1], x[-1]) if endpoint_distance > 0 else 0.0

    values.extend([
        duration,
        path_length,
        endpoint_distance,
        straightness,
        sum_of_angles,
        _max_deviation(x, y),
        direction,
    ])
    return FeatureVector(values)


def extract_all(actions: Iterable[MouseAction]) -> List[FeatureVector]:
    return [extract_features(action) for action in actions]


def feature_matrix(vectors: Sequence[FeatureVector]) -> np.ndarray:
    """Stack vectors into an (n, 31) array."""
    if not vectors:
        return np.empty((0, FEATURE_DIMENSION))
    return np.vstack([fv.values for fv in vectors])


def features_frame(vectors: Sequence[FeatureVector], user_ids: Sequence[int],
                   labels: Sequence[int], ordinals: Sequence[int]) -> pd.DataFrame:
    frame = pd.DataFrame(feature_matrix(vectors), columns=list(FEATURE_NAMES))
    frame['user_id'] = pd.Series(list(user_ids), dtype='int64')
    frame['label'] = pd.Series(list(labels), dtype='int64')
    frame['ordinal'] = pd.Series(list(ordinals), dtype='int64')
    return frame


def write_feature_csv(frame: pd.DataFrame, path):
    """Write a feature matrix atomically; floats keep full precision."""
    with atomic_open(path) as fh:
        frame.to_csv(fh, index=False, lineterminator='\n')


def read_feature_csv(path) -> Tuple[List[FeatureVector], pd.DataFrame]:
    """Read a matrix written by write_feature_csv; returns vectors and the meta columns."""
    frame = pd.read_csv(path, float_precision='round_trip')
    missing = [c for c in FEATURE_NAMES + META_COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError(f"Feature CSV is missing columns: {', '.join(missing)}")
    vectors = [FeatureVector(row) for row in frame[list(FEATURE_NAMES)].to_numpy(dtype=float)]
    return vectors, frame[list(META_COLUMNS)].copy()
