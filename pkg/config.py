"""
Configuration for mouseauth.

Service settings come from the environment (Config classes, selected by
MOUSEAUTH_ENV). The offline pipeline uses PipelineConfig, read from a plain
key=value file with command-line overrides.
"""
import os
from dataclasses import asdict, dataclass, fields, replace
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple, Union

from dotenv import dotenv_values

from dataset.builder import SPLIT_MODES
from forest.params import ForestParams
from mouse.action import DEFAULT_SEQUENCE_LENGTH, SegmenterConfig
from mouse.event import DEFAULT_MAX_COORDINATE, EVENT_MOVE

OUTPUT_DIR_ENV = 'MOUSEAUTH_OUTPUT_DIR'


class Config:
    """Base configuration."""
    _default_secret = 'mouseauth-dev-key-not-for-production'
    SECRET_KEY = os.environ.get('SECRET_KEY', _default_secret)
    DEBUG = False
    TESTING = False

    # Socket.IO settings
    CORS_ALLOWED_ORIGINS = os.environ.get('CORS_ORIGINS', '*')

    # Scoring settings
    MODEL_DIR = os.environ.get('MOUSEAUTH_MODEL_DIR', 'output/models')
    DEFAULT_THRESHOLD = float(os.environ.get('MOUSEAUTH_THRESHOLD', '0.5'))
    SEQUENCE_LENGTH = DEFAULT_SEQUENCE_LENGTH
    STRIDE = None
    EVENT_FILTER = frozenset({EVENT_MOVE})
    MAX_EVENTS_PER_MESSAGE = 5000
    MAX_COORDINATE = int(os.environ.get('MOUSEAUTH_MAX_COORDINATE', str(DEFAULT_MAX_COORDINATE)))
    STREAM_IDLE_SECONDS = 1800.0


class DevelopmentConfig(Config):
    """Development configuration."""
    DEBUG = True


class ProductionConfig(Config):
    """Production configuration."""
    DEBUG = False

    # In production, require SECRET_KEY from environment
    @property
    def SECRET_KEY(self):
        key = os.environ.get('SECRET_KEY')
        if not key:
            raise ValueError('SECRET_KEY must be set in production environment')
        return key

    # In production, set proper CORS origins (do not allow all)
    CORS_ALLOWED_ORIGINS = os.environ.get('CORS_ORIGINS', None)


class TestingConfig(Config):
    """Testing configuration."""
    TESTING = True
    DEBUG = True


# Config mapping
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}


def get_config():
    """Get configuration based on environment."""
    env = os.environ.get('MOUSEAUTH_ENV', 'development')
    cfg_class = config.get(env, config['default'])
    return cfg_class()


# ==================== Pipeline ====================

@dataclass(frozen=True)
class PipelineConfig:
    """
    Everything a pipeline run depends on.

    Defaults are the published setup: actions of 10 movement events without
    overlap, a chronological 70-30 split, threshold 0.5, and forest defaults.
    Without input_dir the run uses a synthetic corpus.
    """
    input_dir: Optional[str] = None
    synth_users: int = 10
    synth_duration: float = 1200.0
    synth_seed: int = 0
    max_coordinate: int = DEFAULT_MAX_COORDINATE
    sequence_length: int = DEFAULT_SEQUENCE_LENGTH
    stride: Optional[int] = None
    event_filter: FrozenSet[int] = frozenset({EVENT_MOVE})
    split_ratio: float = 0.7
    split_mode: str = 'chronological'
    dataset_seed: int = 0
    n_trees: int = 100
    max_depth: Optional[int] = None
    min_samples_leaf: int = 1
    min_samples_split: int = 2
    max_features: Union[str, int] = 'sqrt'
    bootstrap: bool = True
    seed: int = 0
    scenarios: Tuple[str, ...] = ('A', 'B')
    threshold: float = 0.5
    scenario_a_holdout: Optional[float] = None
    target_fpr: Optional[float] = None
    output_dir: str = 'output'
    write_features: bool = False
    n_jobs: int = 1

    def __post_init__(self):
        if not 0 < self.split_ratio < 1:
            raise ValueError(f"split_ratio must be in (0, 1), got {self.split_ratio}")
        if self.split_mode not in SPLIT_MODES:
            raise ValueError(f"split_mode must be one of {', '.join(SPLIT_MODES)}")
        if not self.scenarios or any(s not in ('A', 'B') for s in self.scenarios):
            raise ValueError(f"scenarios must be A and/or B, got {','.join(self.scenarios)}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0,1], got {self.threshold}")
        if self.scenario_a_holdout is not None and not 0 < self.scenario_a_holdout < 1:
            raise ValueError("scenario_a_holdout must be in (0, 1)")
        if self.target_fpr is not None and not 0.0 <= self.target_fpr <= 1.0:
            raise ValueError("target_fpr must be in [0,1]")
        if self.synth_users < 2:
            raise ValueError("synth_users must be at least 2")
        if self.synth_duration <= 0:
            raise ValueError("synth_duration must be positive")
        if self.n_jobs < 1:
            raise ValueError("n_jobs must be positive")
        # validates the windowing and forest settings early
        self.segmenter()
        self.forest_params()

    def segmenter(self) -> SegmenterConfig:
        return SegmenterConfig(self.sequence_length, self.stride, self.event_filter)

    def forest_params(self) -> ForestParams:
        return ForestParams(
            n_trees=self.n_trees,
            max_depth=self.max_depth,
            min_samples_leaf=self.min_samples_leaf,
            min_samples_split=self.min_samples_split,
            max_features=self.max_features,
            bootstrap=self.bootstrap,
            seed=self.seed,
        )

    def to_dict(self) -> Dict[str, str]:
        """Every setting rendered as the text a config file would hold."""
        return {k: _render(v) for k, v in asdict(self).items()}

    def with_overrides(self, overrides: Mapping[str, str]) -> 'PipelineConfig':
        return replace(self, **parse_settings(overrides))


def _render(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (frozenset, set)):
        return ','.join(str(v) for v in sorted(value))
    if isinstance(value, tuple):
        return ','.join(str(v) for v in value)
    return str(value)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ('1', 'true', 'yes', 'on'):
        return True
    if lowered in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _optional(parser):
    def parse(text: str):
        text = text.strip()
        if text == '' or text.lower() == 'none':
            return None
        return parser(text)
    return parse


def _parse_max_features(text: str) -> Union[str, int]:
    text = text.strip()
    return int(text) if text.isdigit() else text


def _parse_int_set(text: str) -> FrozenSet[int]:
    return frozenset(int(part) for part in text.split(',') if part.strip())


def _parse_scenarios(text: str) -> Tuple[str, ...]:
    return tuple(part.strip().upper() for part in text.split(',') if part.strip())


_PARSERS = {
    'input_dir': _optional(str),
    'synth_users': int,
    'synth_duration': float,
    'synth_seed': int,
    'max_coordinate': int,
    'sequence_length': int,
    'stride': _optional(int),
    'event_filter': _parse_int_set,
    'split_ratio': float,
    'split_mode': str.strip,
    'dataset_seed': int,
    'n_trees': int,
    'max_depth': _optional(int),
    'min_samples_leaf': int,
    'min_samples_split': int,
    'max_features': _parse_max_features,
    'bootstrap': _parse_bool,
    'seed': int,
    'scenarios': _parse_scenarios,
    'threshold': float,
    'scenario_a_holdout': _optional(float),
    'target_fpr': _optional(float),
    'output_dir': str.strip,
    'write_features': _parse_bool,
    'n_jobs': int,
}
assert set(_PARSERS) == {f.name for f in fields(PipelineConfig)}


def parse_settings(raw: Mapping[str, Optional[str]]) -> dict:
    """
    Convert text settings to typed values.

    Raises:
        ValueError: Naming the unknown key or the value that failed to parse
    """
    parsed = {}
    for key, value in raw.items():
        name = key.strip().lower()
        if name not in _PARSERS:
            raise ValueError(f"Unknown setting: {key}")
        try:
            parsed[name] = _PARSERS[name](value if value is not None else '')
        except ValueError as e:
            raise ValueError(f"Invalid value for {name}: {e}") from None
    return parsed


def parse_override(text: str) -> Tuple[str, str]:
    """Split a 'key=value' command-line override."""
    if '=' not in text:
        raise ValueError(f"Override must look like key=value, got {text!r}")
    key, value = text.split('=', 1)
    return key.strip(), value.strip()


def load_pipeline_config(path: Optional[str] = None, overrides: Iterable[Tuple[str, str]] = (),
                         environ: Optional[Mapping[str, str]] = None) -> PipelineConfig:
    """
    Build a PipelineConfig.

    Precedence, lowest first: defaults, the key=value file, the
    MOUSEAUTH_OUTPUT_DIR environment variable, command-line overrides.
    """
    environ = os.environ if environ is None else environ
    settings: Dict[str, Optional[str]] = {}
    if path:
        if not os.path.isfile(path):
            raise ValueError(f"Config file not found: {path}")
        settings.update(dotenv_values(path))
    if environ.get(OUTPUT_DIR_ENV):
        settings['output_dir'] = environ[OUTPUT_DIR_ENV]
    settings.update(dict(overrides))
    return PipelineConfig(**parse_settings(settings))
