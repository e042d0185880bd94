import json
import os

import pandas as pd
import pytest

from config import settings
from services.harness import (
    ExperimentHarness,
    instance_source,
    load_manifest,
    read_best_known,
    rebuild_instance,
    replay,
    run_grid,
    save_results,
)
from services.instance_generator import GenSpec, generate
from utils.errors import InputError


@pytest.fixture
def tiny_grid(quick_config):
    instances = [generate(GenSpec(n=5, tau=0.3, R=0.5, seed=1, replicate=i)) for i in range(2)]
    configs = {"quick": quick_config, "wide": quick_config.replace(population_size=8)}
    return instances, configs


def test_single_cell_grid(small_generated, quick_config):
    result = run_grid([small_generated], {"quick": quick_config}, [0], reference_mode=settings.REFERENCE_ORACLE)
    assert len(result.runs) == 1
    assert result.metric == "gap"
    assert result.runs.loc[0, "gap"] >= -1e-9
    row = result.gaps.iloc[0]
    assert row["min"] == row["avg"] == row["max"]
    assert row["instances"] == 1


def test_grid_covers_every_combination(tiny_grid):
    instances, configs = tiny_grid
    result = run_grid(instances, configs, [0, 1])
    assert len(result.runs) == 2 * 2 * 2
    assert set(result.runs["config"]) == {"quick", "wide"}
    assert "wall_time" not in result.runs.columns
    assert len(result.timings()) == 8
    assert (result.runs["gap"] >= -1e-9).all()
    assert set(result.summary.columns) >= {"quick", "wide"}


def test_saved_outputs_are_reproducible(tiny_grid, tmp_path):
    instances, configs = tiny_grid
    first = save_results(run_grid(instances, configs, [0, 1]), str(tmp_path / "first"))
    second = save_results(run_grid(instances, configs, [0, 1]), str(tmp_path / "second"))
    for name in (settings.RUNS_CSV, settings.GAPS_CSV, settings.GAP_SUMMARY_CSV, settings.MANIFEST_JSON):
        with open(first[name], "rb") as a, open(second[name], "rb") as b:
            assert a.read() == b.read(), name
    assert os.path.exists(first[settings.SUMMARY_MD])
    assert os.path.exists(first[settings.TIMINGS_CSV])


def test_manifest_replays_the_grid(tiny_grid, tmp_path):
    instances, configs = tiny_grid
    result = run_grid(instances, configs, [3], baseline="quick")
    paths = save_results(result, str(tmp_path))
    with open(paths[settings.MANIFEST_JSON], encoding="utf-8") as f:
        manifest = json.load(f)
    assert manifest["seeds"] == [3]
    assert manifest["baseline"] == "quick"
    assert len(manifest["runs"]) == 4

    replayed = replay(paths[settings.MANIFEST_JSON])
    pd.testing.assert_frame_equal(replayed.runs, result.runs)
    assert "wide_gap_to_quick" in replayed.summary.columns


def test_missing_references_fall_back_to_fitness(small_generated, quick_config, capsys):
    result = run_grid([small_generated], {"quick": quick_config}, [0],
                      reference_mode=settings.REFERENCE_BEST_KNOWN, best_known={})
    assert result.metric == "fitness"
    assert result.gaps.loc[0, "metric"] == "fitness"
    assert "falling back to raw fitness" in capsys.readouterr().out


def test_no_reference_mode(small_generated, quick_config):
    result = run_grid([small_generated], {"quick": quick_config}, [0], reference_mode=settings.REFERENCE_NONE)
    assert "gap" not in result.runs.columns
    assert result.metric == "fitness"


def test_best_known_values(small_generated, quick_config, tmp_path):
    path = tmp_path / "best.csv"
    path.write_text(f"instance,value\n{small_generated.label},1000\n")
    best_known = read_best_known(str(path))
    assert best_known == {small_generated.label: 1000.0}
    result = run_grid([small_generated], {"quick": quick_config}, [0],
                      reference_mode=settings.REFERENCE_BEST_KNOWN, best_known=best_known)
    assert result.runs.loc[0, "gap"] > 0
    with pytest.raises(InputError):
        read_best_known(str(tmp_path / "missing.csv"))


def test_hand_built_instances_travel_inline(make_instance):
    instance = make_instance([(0, 2, 5, 8, 3, 1), (1, 3, 9, 12, 4, 0.5)], setup=2.0)
    source = instance_source(instance)
    assert "text" in source
    rebuilt = rebuild_instance(source)
    assert rebuilt.orders == instance.orders
    assert rebuilt.label == instance.label
    with pytest.raises(InputError):
        rebuild_instance({"label": "x"})


def test_harness_rejects_bad_grids(small_generated, quick_config):
    with pytest.raises(InputError):
        ExperimentHarness([small_generated], {"quick": quick_config}, [0], reference_mode="median")
    with pytest.raises(InputError):
        ExperimentHarness([small_generated, small_generated], {"quick": quick_config}, [0])
    with pytest.raises(InputError):
        load_manifest("no-such-manifest.json")
