"""
Instance property metrics used to explain benchmark difficulty
"""
from dataclasses import asdict, dataclass, field
from typing import List

import numpy as np

PROPERTY_NAMES = (
    "setup_std",
    "window_std",
    "revenue_std",
    "horizon",
    "window_mean",
    "congestion_ratio",
    "processing_std",
    "conflict_mean",
    "conflict_std",
    "setup_window_ratio",
    "process_window_ratio",
    "processing_revenue_correlation",
)


@dataclass
class PropertyReport:
    setup_std: float
    window_std: float
    revenue_std: float
    horizon: float
    window_mean: float
    congestion_ratio: float
    processing_std: float
    conflict_mean: float
    conflict_std: float
    setup_window_ratio: float
    process_window_ratio: float
    processing_revenue_correlation: float
    warnings: List[str] = field(default_factory=list)

    def to_dict(self):
        values = asdict(self)
        values.pop("warnings")
        return values


def conflict_ratios(releases, deadlines):
    """Per order: total overlap of its window with every other window, over its own length"""
    warnings = []
    ratios = np.zeros(len(releases))
    for i in range(len(releases)):
        length = deadlines[i] - releases[i]
        if length <= 0:
            warnings.append(f"⚠️ Order {i + 1} has a zero-length window; conflict ratio set to 0")
            continue
        overlap = np.clip(np.minimum(deadlines, deadlines[i]) - np.maximum(releases, releases[i]), 0.0, None)
        overlap[i] = 0.0
        ratios[i] = overlap.sum() / length
    return ratios, warnings


def pearson(x, y):
    """Correlation clamped to [-1, 1]; 0 when either side is constant"""
    if len(x) < 2 or np.std(x) == 0 or np.std(y) == 0:
        return 0.0
    return float(np.clip(np.corrcoef(x, y)[0, 1], -1.0, 1.0))


def properties(instance, verbose=True):
    """Twelve descriptive metrics of an instance (population standard deviations)"""
    n = instance.n
    releases = np.array(instance.releases[1:], dtype=float)
    processing = np.array(instance.processing_times[1:], dtype=float)
    deadlines = np.array(instance.deadlines[1:], dtype=float)
    revenues = np.array(instance.revenues[1:], dtype=float)
    windows = deadlines - releases

    real_setups = np.asarray(instance.setup, dtype=float)[1:, 1:]
    off_diagonal = ~np.eye(n, dtype=bool)
    pair_setups = real_setups[off_diagonal] if n > 1 else np.zeros(1)

    horizon = float(deadlines.max() - releases.min())
    if n > 1:
        incoming = np.where(off_diagonal, real_setups, np.inf).min(axis=0)
    else:
        incoming = np.zeros(n)
    congestion = float((processing + incoming).sum() / horizon) if horizon > 0 else 0.0

    conflicts, warnings = conflict_ratios(releases, deadlines)
    window_mean = float(windows.mean())

    report = PropertyReport(
        setup_std=float(np.std(pair_setups)),
        window_std=float(np.std(windows)),
        revenue_std=float(np.std(revenues)),
        horizon=horizon,
        window_mean=window_mean,
        congestion_ratio=congestion,
        processing_std=float(np.std(processing)),
        conflict_mean=float(conflicts.mean()),
        conflict_std=float(np.std(conflicts)),
        setup_window_ratio=float(pair_setups.mean() / window_mean) if window_mean > 0 else 0.0,
        process_window_ratio=float(processing.mean() / window_mean) if window_mean > 0 else 0.0,
        processing_revenue_correlation=pearson(processing, revenues),
        warnings=warnings,
    )
    if verbose:
        for warning in warnings:
            print(warning)
    return report
