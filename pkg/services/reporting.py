"""
Gap computations and the tables built from run records
"""
import math

import numpy as np
import pandas as pd
from scipy.stats import spearmanr

from processors.instance_properties import PROPERTY_NAMES
from utils.errors import InputError

GROUP_COLUMNS = ["family", "n", "tau", "R", "q", "c"]
TREND_FACTORS = ("tau", "R", "n")


def gap(fitness, reference):
    """Percent gap of fitness below reference; negative when fitness beats it"""
    if reference is None or not reference > 0:
        raise InputError(f"Gap reference must be positive, got {reference}")
    return 100.0 * (reference - fitness) / reference


def gap_to_baseline(gap_a, gap_b):
    """Relative gap (A - B) / B; None when the baseline gap is zero or missing"""
    if gap_a is None or gap_b is None:
        return None
    if (isinstance(gap_b, float) and math.isnan(gap_b)) or (isinstance(gap_a, float) and math.isnan(gap_a)):
        return None
    if gap_b == 0:
        return None
    return (gap_a - gap_b) / gap_b


def best_of_configs(runs):
    """Best fitness per instance over every configuration and seed"""
    return runs.groupby("instance")["fitness"].max().to_dict()


def attach_gaps(runs, references):
    """Add reference and gap columns; instances without a usable reference get NaN"""
    runs = runs.copy()
    runs["reference"] = runs["instance"].map(references).astype(float)
    gaps = []
    missing = set()
    for fitness, reference, instance in zip(runs["fitness"], runs["reference"], runs["instance"]):
        try:
            gaps.append(gap(fitness, reference) if not math.isnan(reference) else float("nan"))
        except InputError:
            gaps.append(float("nan"))
        if math.isnan(gaps[-1]):
            missing.add(instance)
    runs["gap"] = gaps
    for instance in sorted(missing):
        print(f"⚠️ No usable gap reference for {instance}; reporting raw fitness for it")
    return runs


def present_group_columns(frame):
    """Grouping columns that carry at least one value"""
    return [c for c in GROUP_COLUMNS if c in frame.columns and frame[c].notna().any()]


def value_column(runs):
    """'gap' when any gap is defined, otherwise raw fitness"""
    if "gap" in runs.columns and runs["gap"].notna().any():
        return "gap"
    return "fitness"


def instance_means(runs, value=None):
    """First stage: mean over seeds per (config, instance)"""
    value = value or value_column(runs)
    keys = ["config", "instance"] + present_group_columns(runs)
    return (runs.groupby(keys, dropna=False)[value].mean()
            .reset_index().rename(columns={value: "mean_" + value}))


def aggregate_gaps(runs, value=None):
    """
    Second stage: min, average and max of the per-instance means over every
    instance of a group, per configuration.
    """
    value = value or value_column(runs)
    per_instance = instance_means(runs, value)
    keys = ["config"] + present_group_columns(runs)
    column = "mean_" + value
    table = (per_instance.groupby(keys, dropna=False)[column]
             .agg(["min", "mean", "max", "count"])
             .reset_index()
             .rename(columns={"mean": "avg", "count": "instances"}))
    table.insert(len(keys), "metric", value)
    return table.sort_values(keys).reset_index(drop=True)


def gap_summary(gaps, baseline=None):
    """Group rows with one avg column per configuration, plus relative columns against baseline"""
    keys = [c for c in GROUP_COLUMNS if c in gaps.columns]
    index = keys or ["metric"]
    frame = gaps.copy()
    frame[index] = frame[index].astype(object).where(frame[index].notna(), "")
    summary = frame.pivot_table(index=index, columns="config", values="avg").reset_index()
    summary.columns.name = None
    configs = sorted(gaps["config"].unique())
    if baseline is not None:
        if baseline not in configs:
            print(f"⚠️ Baseline configuration {baseline} is not part of this run; skipping relative gaps")
        else:
            for config in configs:
                if config == baseline:
                    continue
                summary[f"{config}_gap_to_{baseline}"] = [
                    gap_to_baseline(a, b) for a, b in zip(summary[config], summary[baseline])
                ]
    return summary


def _spearman(x, y):
    frame = pd.DataFrame({"x": x, "y": y}).dropna()
    if len(frame) < 3 or frame["x"].nunique() < 2 or frame["y"].nunique() < 2:
        return None
    result = spearmanr(frame["x"], frame["y"])
    return float(result.statistic if hasattr(result, "statistic") else result[0]), float(result.pvalue), len(frame)


def difficulty_trends(runs, value=None):
    """Spearman correlation of the per-instance mean gap with tau, R and n, per configuration"""
    value = value or value_column(runs)
    per_instance = instance_means(runs, value)
    rows = []
    for config, frame in per_instance.groupby("config"):
        for factor in TREND_FACTORS:
            if factor not in frame.columns:
                continue
            result = _spearman(frame[factor], frame["mean_" + value])
            if result is None:
                continue
            rho, p_value, count = result
            rows.append({"config": config, "factor": factor, "metric": value,
                         "rho": rho, "p_value": p_value, "instances": count})
    return pd.DataFrame(rows, columns=["config", "factor", "metric", "rho", "p_value", "instances"])


def property_correlations(properties, runs, value=None):
    """Spearman correlation of every instance property with the per-instance mean gap"""
    value = value or value_column(runs)
    per_instance = (runs.groupby("instance")[value].mean().rename("mean_" + value).reset_index())
    merged = properties.merge(per_instance, on="instance", how="inner")
    rows = []
    for name in PROPERTY_NAMES:
        if name not in merged.columns:
            continue
        result = _spearman(merged[name], merged["mean_" + value])
        rho, p_value, count = result if result is not None else (np.nan, np.nan, len(merged))
        rows.append({"property": name, "metric": value, "rho": rho, "p_value": p_value, "instances": count})
    return pd.DataFrame(rows, columns=["property", "metric", "rho", "p_value", "instances"])
