"""
Offline pipeline: parse -> dedupe -> segment -> extract -> datasets ->
per-user forests -> scenarios -> reports, models and manifest.
"""
import logging
import os
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence

import pandas as pd

from config import PipelineConfig
from dataset.builder import (
    GENUINE,
    MasterDatasets,
    UserSplit,
    assemble_master,
    build_user_dataset,
    split_user,
    write_user_dataset,
)
from evaluation.report import render_report_table, write_report_csv
from evaluation.scenarios import EvalReport, EvaluationError, run_scenario, train_user_models
from forest.forest import RandomForestModel, save_model
from io_utils import atomic_open, atomic_write_text, file_digest
from mouse.action import SegmenterConfig, segment_actions
from mouse.event import DEFAULT_MAX_COORDINATE, SessionLog, dedupe_events, read_session_file, write_session_log
from mouse.features import FeatureVector, extract_all, features_frame, write_feature_csv
from synth.generator import generate_corpus

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.txt'


class PipelineError(ValueError):
    """A pipeline stage failed; names the stage and, when known, the user."""

    def __init__(self, stage: str, message: str, user_id: Optional[int] = None):
        self.stage = stage
        self.user_id = user_id
        where = f"{stage} stage" + (f", user {user_id}" if user_id is not None else '')
        super().__init__(f"{where}: {message}")


@dataclass
class SessionSource:
    """One parsed input session and where it came from."""
    name: str
    log: SessionLog
    digest: Optional[str] = None
    duplicates_removed: int = 0
    cleaned: list = field(default_factory=list)

    @property
    def user_id(self) -> Optional[int]:
        return self.log.user_id


@dataclass
class RunResult:
    config: PipelineConfig
    master: MasterDatasets
    models: Dict[int, RandomForestModel]
    reports: Dict[str, EvalReport]
    action_counts: Dict[int, int]
    written: List[str] = field(default_factory=list)

    @property
    def manifest_path(self) -> str:
        return os.path.join(self.config.output_dir, MANIFEST_NAME)


# ==================== Sessions ====================

def list_input_files(input_dir: str) -> List[str]:
    """Regular, non-hidden files of a directory in name order."""
    if not os.path.isdir(input_dir):
        raise PipelineError('parse', f"input directory not found: {input_dir}")
    names = sorted(n for n in os.listdir(input_dir)
                   if not n.startswith('.') and os.path.isfile(os.path.join(input_dir, n)))
    if not names:
        raise PipelineError('parse', "no input files")
    return [os.path.join(input_dir, n) for n in names]


def _clean(name: str, log: SessionLog, digest: Optional[str] = None) -> SessionSource:
    cleaned = dedupe_events(log.events)
    return SessionSource(name=name, log=log, digest=digest,
                         duplicates_removed=len(log) - len(cleaned), cleaned=cleaned)


def load_sessions(input_dir: str, max_coordinate: int) -> List[SessionSource]:
    """
    Parse and dedupe every file of input_dir.

    Raises:
        PipelineError: On an empty directory or a malformed file
    """
    sources = []
    for path in list_input_files(input_dir):
        name = os.path.basename(path)
        try:
            log = read_session_file(path, max_coordinate)
        except ValueError as e:
            raise PipelineError('parse', f"{name}: {e}") from e
        source = _clean(name, log, file_digest(path))
        logger.info(f"Parsed {name}: {len(log)} events, "
                    f"{source.duplicates_removed} duplicates removed")
        sources.append(source)
    return sources


def synthetic_sessions(n_users: int, duration: float, seed: int) -> List[SessionSource]:
    corpus = generate_corpus(n_users, duration, seed)
    logger.info(f"Generated {n_users} synthetic sessions of {duration} s (seed {seed})")
    return [_clean(f"synthetic_user_{uid}", log) for uid, log in sorted(corpus.items())]


def clean_sessions(input_dir: str, output_dir: Optional[str] = None,
                   max_coordinate: int = DEFAULT_MAX_COORDINATE) -> List[SessionSource]:
    """Parse and dedupe input_dir; with output_dir, also write the cleaned logs."""
    sources = load_sessions(input_dir, max_coordinate)
    if output_dir:
        for source in sources:
            cleaned = SessionLog(user_id=source.user_id, events=source.cleaned)
            with atomic_open(os.path.join(output_dir, source.name)) as fh:
                write_session_log(cleaned, fh)
    return sources


# ==================== Features ====================

def user_features(sources: Iterable[SessionSource], segmenter: SegmenterConfig) -> Dict[int, List[FeatureVector]]:
    """
    Segment and featurize each user's deduped sessions.

    A user with several sessions gets their actions concatenated in file
    order; windows never cross a session boundary.
    """
    features: Dict[int, List[FeatureVector]] = {}
    for source in sources:
        if source.user_id is None:
            logger.warning(f"Skipping empty session {source.name}")
            continue
        try:
            actions = segment_actions(source.cleaned, segmenter)
        except ValueError as e:
            raise PipelineError('segment', str(e), source.user_id) from e
        try:
            vectors = extract_all(actions)
        except ValueError as e:
            raise PipelineError('extract', str(e), source.user_id) from e
        features.setdefault(source.user_id, []).extend(vectors)
    return features


def build_master(features: Dict[int, List[FeatureVector]], config: PipelineConfig) -> MasterDatasets:
    """Chronological (or seeded random) split per user, then one balanced dataset per owner."""
    if len(features) < 2:
        raise PipelineError('dataset', f"at least 2 users are required, got {len(features)}")
    splits = {}
    for uid in sorted(features):
        if not features[uid]:
            raise PipelineError('dataset', "session too short to form a single action", uid)
        train, test = split_user(list(enumerate(features[uid])), config.split_ratio,
                                 config.split_mode, seed=config.dataset_seed + uid)
        splits[uid] = UserSplit(uid, train, test)
    datasets = []
    for uid in sorted(splits):
        try:
            datasets.append(build_user_dataset(uid, splits, seed=config.dataset_seed))
        except ValueError as e:
            raise PipelineError('dataset', str(e), uid) from e
    try:
        return assemble_master(datasets)
    except ValueError as e:
        raise PipelineError('dataset', str(e)) from e


# ==================== Run ====================

def _sources(config: PipelineConfig) -> List[SessionSource]:
    if config.input_dir:
        return load_sessions(config.input_dir, config.max_coordinate)
    return synthetic_sessions(config.synth_users, config.synth_duration, config.synth_seed)


def _evaluate(config: PipelineConfig, master: MasterDatasets):
    params = config.forest_params()
    try:
        models = train_user_models(master, params, n_jobs=config.n_jobs,
                                   window=config.segmenter().to_dict())
    except EvaluationError as e:
        raise PipelineError('train', str(e), e.user_id) from e
    reports = {}
    for scenario in config.scenarios:
        try:
            reports[scenario] = run_scenario(
                scenario, master, params, models=models, threshold=config.threshold,
                scenario_a_holdout=config.scenario_a_holdout, target_fpr=config.target_fpr,
                n_jobs=config.n_jobs,
            )
        except EvaluationError as e:
            raise PipelineError('evaluate', str(e), e.user_id) from e
    return models, reports


def _write_features(out_dir: str, features: Dict[int, List[FeatureVector]],
                    master: MasterDatasets) -> List[str]:
    written = []
    for uid in sorted(features):
        vectors = features[uid]
        path = os.path.join(out_dir, 'features', f"user_{uid}.csv")
        frame = features_frame(vectors, [uid] * len(vectors), [GENUINE] * len(vectors), range(len(vectors)))
        write_feature_csv(frame, path)
        written.append(path)
    for uid in master.user_ids:
        written.extend(write_user_dataset(master[uid], os.path.join(out_dir, 'datasets')))
    return written


def _manifest(config: PipelineConfig, sources: Sequence[SessionSource], action_counts: Dict[int, int],
              master: MasterDatasets, written: Sequence[str]) -> str:
    lines = ['# mouseauth run manifest']
    for key, value in sorted(config.to_dict().items()):
        lines.append(f"config.{key}={value}")
    lines.append(f"source={'files' if config.input_dir else 'synthetic'}")
    for source in sources:
        prefix = f"input.{source.name}"
        lines.append(f"{prefix}.user_id={'' if source.user_id is None else source.user_id}")
        lines.append(f"{prefix}.events={len(source.log)}")
        lines.append(f"{prefix}.duplicates_removed={source.duplicates_removed}")
        lines.append(f"{prefix}.out_of_order={source.log.out_of_order}")
        if source.digest:
            lines.append(f"{prefix}.sha256={source.digest}")
    for uid in sorted(action_counts):
        lines.append(f"user.{uid}.actions={action_counts[uid]}")
    for key in sorted(master.summary):
        lines.append(f"dataset.{key}={master.summary[key]}")
    for path in written:
        rel = os.path.relpath(path, config.output_dir).replace(os.sep, '/')
        lines.append(f"output.{rel}.sha256={file_digest(path)}")
    return '\n'.join(lines) + '\n'


def run_pipeline(config: PipelineConfig) -> RunResult:
    """
    Run the full pipeline and write its outputs under config.output_dir.

    Raises:
        PipelineError: Naming the failed stage and, when known, the user
    """
    sources = _sources(config)
    features = user_features(sources, config.segmenter())
    action_counts = {uid: len(v) for uid, v in features.items()}
    for uid in sorted(action_counts):
        logger.info(f"User {uid}: {action_counts[uid]} actions")
    master = build_master(features, config)
    logger.info(f"Datasets: {master.summary['total_train_genuine']} train / "
                f"{master.summary['total_test_genuine']} test genuine actions")

    models, reports = _evaluate(config, master)

    out_dir = config.output_dir
    written: List[str] = []
    try:
        for scenario, report in reports.items():
            csv_path = os.path.join(out_dir, f"report_{scenario}.csv")
            txt_path = os.path.join(out_dir, f"report_{scenario}.txt")
            write_report_csv(report, csv_path)
            atomic_write_text(txt_path, render_report_table(report))
            written += [csv_path, txt_path]
        for uid in sorted(models):
            path = os.path.join(out_dir, 'models', f"user_{uid}.json")
            save_model(models[uid], path)
            written.append(path)
        if config.write_features:
            written += _write_features(out_dir, features, master)
        atomic_write_text(os.path.join(out_dir, MANIFEST_NAME),
                          _manifest(config, sources, action_counts, master, written))
    except OSError as e:
        raise PipelineError('write', str(e)) from e
    logger.info(f"Wrote {len(written) + 1} files to {out_dir}")
    return RunResult(config, master, models, reports, action_counts, written)


# ==================== Sweep ====================

SWEEP_COLUMNS = ['SequenceLength', 'Actions', 'ACC', 'FNR', 'FPR', 'EER']


def sweep_sequence_lengths(config: PipelineConfig, lengths: Sequence[int], scenario: str = 'B') -> pd.DataFrame:
    """
    Average ACC/FNR/FPR/EER of one scenario for each action length.

    Sessions are loaded once; everything after dedupe is recomputed per
    length with the other settings unchanged.
    """
    if not lengths:
        raise ValueError("At least one sequence length is required")
    sources = _sources(config)
    rows = []
    for length in lengths:
        current = replace(config, sequence_length=length)
        features = user_features(sources, current.segmenter())
        master = build_master(features, current)
        try:
            report = run_scenario(scenario, master, current.forest_params(),
                                  threshold=current.threshold, n_jobs=current.n_jobs)
        except EvaluationError as e:
            raise PipelineError('evaluate', str(e), e.user_id) from e
        logger.info(f"L={length}: avg acc={report.avg.acc:.4f} eer={report.avg.eer:.6f}")
        rows.append([length, sum(len(v) for v in features.values()),
                     report.avg.acc, report.avg.fnr, report.avg.fpr, report.avg.eer])
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)
