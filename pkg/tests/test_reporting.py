import math

import pandas as pd
import pytest

from services.reporting import (
    aggregate_gaps,
    attach_gaps,
    best_of_configs,
    difficulty_trends,
    gap,
    gap_summary,
    gap_to_baseline,
    instance_means,
    property_correlations,
    value_column,
)
from utils.errors import InputError


def _runs(rows):
    """rows: (instance, config, seed, fitness, tau)"""
    return pd.DataFrame([
        {"instance": instance, "config": config, "seed": seed, "fitness": fitness,
         "family": "cesaret", "n": 10, "tau": tau, "R": 0.5, "q": None, "c": None}
        for instance, config, seed, fitness, tau in rows
    ])


def test_gap_is_percent_below_reference():
    assert gap(90, 100) == pytest.approx(10.0)
    assert gap(100, 100) == 0
    assert gap(110, 100) == pytest.approx(-10.0)
    with pytest.raises(InputError):
        gap(5, 0)


def test_gap_to_baseline():
    assert gap_to_baseline(2.0, 1.0) == pytest.approx(1.0)
    assert gap_to_baseline(0.5, 1.0) == pytest.approx(-0.5)
    assert gap_to_baseline(1.0, 0.0) is None
    assert gap_to_baseline(1.0, float("nan")) is None
    assert gap_to_baseline(None, 1.0) is None


def test_best_of_configs_takes_the_maximum():
    runs = _runs([("a", "set1", 0, 80, 0.1), ("a", "set3", 0, 95, 0.1), ("b", "set1", 0, 40, 0.1)])
    assert best_of_configs(runs) == {"a": 95, "b": 40}


def test_missing_reference_gives_nan_and_a_warning(capsys):
    runs = _runs([("a", "set1", 0, 90, 0.1), ("b", "set1", 0, 40, 0.1)])
    with_gaps = attach_gaps(runs, {"a": 100.0})
    assert with_gaps.loc[0, "gap"] == pytest.approx(10.0)
    assert math.isnan(with_gaps.loc[1, "gap"])
    assert "No usable gap reference for b" in capsys.readouterr().out
    assert value_column(with_gaps) == "gap"
    assert value_column(runs) == "fitness"


def test_two_stage_aggregation():
    runs = _runs([
        ("a", "set3", 0, 100, 0.1), ("a", "set3", 1, 90, 0.1),
        ("b", "set3", 0, 80, 0.1), ("b", "set3", 1, 80, 0.1),
    ])
    runs = attach_gaps(runs, {"a": 100.0, "b": 100.0})
    means = instance_means(runs)
    assert sorted(means["mean_gap"].tolist()) == pytest.approx([5.0, 20.0])

    table = aggregate_gaps(runs)
    assert len(table) == 1
    row = table.iloc[0]
    assert (row["min"], row["avg"], row["max"]) == pytest.approx((5.0, 12.5, 20.0))
    assert row["instances"] == 2
    assert row["metric"] == "gap"
    assert "q" not in table.columns


def test_single_instance_group_has_equal_statistics():
    runs = attach_gaps(_runs([("a", "set3", 0, 75, 0.1)]), {"a": 100.0})
    row = aggregate_gaps(runs).iloc[0]
    assert row["min"] == row["avg"] == row["max"] == pytest.approx(25.0)


def test_summary_adds_relative_columns_against_baseline():
    runs = _runs([("a", "set1", 0, 80, 0.1), ("a", "set3", 0, 90, 0.1)])
    gaps = aggregate_gaps(attach_gaps(runs, {"a": 100.0}))
    summary = gap_summary(gaps, baseline="set3")
    assert summary.loc[0, "set1"] == pytest.approx(20.0)
    assert summary.loc[0, "set3"] == pytest.approx(10.0)
    assert summary.loc[0, "set1_gap_to_set3"] == pytest.approx(1.0)


def test_summary_with_unknown_baseline_warns(capsys):
    gaps = aggregate_gaps(attach_gaps(_runs([("a", "set1", 0, 80, 0.1)]), {"a": 100.0}))
    summary = gap_summary(gaps, baseline="set9")
    assert "skipping relative gaps" in capsys.readouterr().out
    assert not any(column.endswith("_gap_to_set9") for column in summary.columns)


def test_difficulty_trend_follows_tardiness_factor():
    runs = _runs([(f"i{k}", "set3", 0, 100 - 10 * k, tau) for k, tau in enumerate([0.1, 0.3, 0.5, 0.7])])
    runs = attach_gaps(runs, {f"i{k}": 100.0 for k in range(4)})
    trends = difficulty_trends(runs)
    tau_row = trends[trends["factor"] == "tau"].iloc[0]
    assert tau_row["rho"] == pytest.approx(1.0)
    assert tau_row["instances"] == 4
    assert "n" not in set(trends["factor"])


def test_property_correlations():
    runs = _runs([(f"i{k}", "set3", 0, 100 - 10 * k, 0.1) for k in range(4)])
    runs = attach_gaps(runs, {f"i{k}": 100.0 for k in range(4)})
    props = pd.DataFrame({"instance": [f"i{k}" for k in range(4)],
                          "setup_std": [4.0, 3.0, 2.0, 1.0],
                          "horizon": [50.0, 50.0, 50.0, 50.0]})
    table = property_correlations(props, runs).set_index("property")
    assert table.loc["setup_std", "rho"] == pytest.approx(-1.0)
    assert math.isnan(table.loc["horizon", "rho"])
