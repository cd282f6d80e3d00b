"""
Seeded synthetic mouse sessions.

Each user is a bounded correlated random walk: heading drifts with Gaussian
turn noise, speed follows an AR(1) process around the user's base speed, the
cursor reflects off the screen edges, and positions are rounded to pixels.
Stationary runs (pauses) repeat one coordinate and give dedupe something to
remove.
"""
import math
from dataclasses import asdict, dataclass
from typing import Dict

import numpy as np

from mouse.event import EVENT_MOVE, MouseEvent, SessionLog

SPEED_LADDER_BASE = 200.0  # px/s
SPEED_LADDER_RATIO = 1.22
SPEED_LADDER_SIZE = 12
DEFAULT_START_TIME = 1616448584.0
SPEED_CORRELATION = 0.9
MIN_SAMPLE_GAP = 1e-3
PAUSE_LENGTH = (3, 20)


@dataclass(frozen=True)
class UserProfile:
    base_speed: float
    speed_jitter: float
    turn_rate: float
    tremor: float
    sample_interval: float
    interval_jitter: float
    pause_probability: float
    screen_width: int = 1920
    screen_height: int = 1080

    def __post_init__(self):
        if self.base_speed <= 0:
            raise ValueError(f"base_speed must be positive, got {self.base_speed}")
        if self.sample_interval <= 0:
            raise ValueError(f"sample_interval must be positive, got {self.sample_interval}")
        for name in ('speed_jitter', 'turn_rate', 'tremor', 'interval_jitter'):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        # 1.0 is accepted for the degenerate always-paused session
        if not 0 <= self.pause_probability <= 1:
            raise ValueError(f"pause_probability must be in [0,1], got {self.pause_probability}")
        if self.screen_width < 2 or self.screen_height < 2:
            raise ValueError("Screen must be at least 2x2 pixels")

    def to_dict(self) -> dict:
        return asdict(self)


def generate_profile(user_id: int, seed: int = 0) -> UserProfile:
    """
    Deterministic profile of one synthetic user.

    Base speeds sit on a geometric ladder (ratio 1.22) indexed by
    user_id % 12 with under 1.5% jitter, so any two ids in one cycle of 12
    differ in base speed by at least 20%.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, user_id]))
    rung = user_id % SPEED_LADDER_SIZE
    base_speed = SPEED_LADDER_BASE * SPEED_LADDER_RATIO ** rung * (1.0 + 0.015 * rng.random())
    return UserProfile(
        base_speed=float(base_speed),
        speed_jitter=float(rng.uniform(0.05, 0.3)),
        turn_rate=float(rng.uniform(0.02, 0.3)),
        tremor=float(rng.uniform(0.0, 0.8)),
        sample_interval=float(rng.uniform(0.008, 0.012)),
        interval_jitter=float(rng.uniform(0.0, 0.2)),
        pause_probability=float(rng.uniform(0.001, 0.02)),
    )


def _reflect(value: float, upper: float):
    """Fold a coordinate back into [0, upper]; returns (value, flipped)."""
    flipped = False
    while value < 0 or value > upper:
        value = -value if value < 0 else 2 * upper - value
        flipped = not flipped
    return value, flipped


def generate_session(profile: UserProfile, duration: float, seed: int = 0, user_id: int = 0,
                     start_time: float = DEFAULT_START_TIME) -> SessionLog:
    """
    Simulate one session of ``duration`` seconds.

    Raises:
        ValueError: When duration is not positive
    """
    if duration <= 0:
        raise ValueError(f"duration must be positive, got {duration}")
    rng = np.random.default_rng(np.random.SeedSequence([seed, user_id, 1]))
    max_x = profile.screen_width - 1
    max_y = profile.screen_height - 1

    x = rng.uniform(0.25, 0.75) * max_x
    y = rng.uniform(0.25, 0.75) * max_y
    heading = rng.uniform(-math.pi, math.pi)
    speed = profile.base_speed
    speed_noise = profile.speed_jitter * profile.base_speed * math.sqrt(1 - SPEED_CORRELATION ** 2)

    events = []
    t = start_time
    pause_left = 0
    while t - start_time < duration:
        if pause_left == 0 and rng.random() < profile.pause_probability:
            pause_left = int(rng.integers(PAUSE_LENGTH[0], PAUSE_LENGTH[1] + 1))
        paused = pause_left > 0
        if paused:
            pause_left -= 1
            px, py = int(round(x)), int(round(y))
        else:
            px = int(np.clip(round(x + rng.normal(0, profile.tremor)), 0, max_x))
            py = int(np.clip(round(y + rng.normal(0, profile.tremor)), 0, max_y))
        events.append(MouseEvent(t, px, py, EVENT_MOVE, user_id))

        dt = profile.sample_interval * (1.0 + profile.interval_jitter * rng.uniform(-1.0, 1.0))
        dt = max(dt, MIN_SAMPLE_GAP)
        t += dt
        if paused:
            continue
        heading += profile.turn_rate * rng.normal()
        speed = profile.base_speed + SPEED_CORRELATION * (speed - profile.base_speed) + speed_noise * rng.normal()
        speed = max(speed, 0.05 * profile.base_speed)
        x += speed * dt * math.cos(heading)
        y += speed * dt * math.sin(heading)
        x, flip_x = _reflect(x, max_x)
        y, flip_y = _reflect(y, max_y)
        if flip_x:
            heading = math.pi - heading
        if flip_y:
            heading = -heading

    return SessionLog(user_id=user_id, events=events)


def generate_corpus(n_users: int, duration: float, seed: int = 0) -> Dict[int, SessionLog]:
    """One session per user id 0..n_users-1."""
    return {
        uid: generate_session(generate_profile(uid, seed), duration, seed, user_id=uid)
        for uid in range(n_users)
    }
