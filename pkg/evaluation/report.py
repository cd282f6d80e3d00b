"""
Report rendering: CSV (full precision) and an aligned text table (4 decimals).
"""
from typing import List

import pandas as pd

from io_utils import atomic_open

from .scenarios import EvalReport, MetricRow

BASE_COLUMNS = ['User', 'GenuineActions', 'ACC', 'FNR', 'FPR', 'EER', 'EERThreshold']
TARGET_COLUMNS = ['TargetThreshold', 'TargetFNR', 'TargetFPR']


def _row_values(row: MetricRow, with_target: bool) -> list:
    values = [str(row.user_id), row.genuine_action_count, row.acc, row.fnr, row.fpr,
              row.eer, row.eer_threshold]
    if with_target:
        values += [row.target_threshold, row.target_fnr, row.target_fpr]
    return values


def report_frame(report: EvalReport) -> pd.DataFrame:
    """Per-user rows followed by the Avg. and Std. rows."""
    with_target = report.target_fpr is not None
    columns: List[str] = BASE_COLUMNS + (TARGET_COLUMNS if with_target else [])
    rows = list(report.rows) + [report.avg, report.std]
    frame = pd.DataFrame([_row_values(r, with_target) for r in rows], columns=columns)
    frame['GenuineActions'] = frame['GenuineActions'].astype('Int64')
    return frame


def write_report_csv(report: EvalReport, path):
    with atomic_open(path) as fh:
        report_frame(report).to_csv(fh, index=False, na_rep='', lineterminator='\n')


def render_report_table(report: EvalReport) -> str:
    """Plain-text table shaped like the per-user result tables; EER also as a percentage."""
    frame = report_frame(report)
    frame.insert(frame.columns.get_loc('EER') + 1, 'EER%', frame['EER'] * 100.0)
    rate = '{:.4f}'.format
    formatters = {c: rate for c in frame.columns if c not in ('User', 'GenuineActions')}
    formatters['GenuineActions'] = lambda v: '' if pd.isna(v) else str(v)
    title = f"Scenario {report.scenario} (threshold = {report.threshold})"
    if report.target_fpr is not None:
        title += f", target FPR <= {report.target_fpr}"
    return title + '\n' + frame.to_string(index=False, formatters=formatters) + '\n'
