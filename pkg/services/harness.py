"""
Experiment harness: runs every (instance, configuration, seed) of a grid,
turns the records into gap tables and writes a manifest that replays the
grid exactly
"""
import json
import os
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

import pandas as pd
from joblib import Parallel, delayed

from config import settings
from config.solver_config import SolverConfig
from services import reporting
from services.instance_generator import GenSpec, generate
from services.oracle import exact_solve
from services.solver import solve
from utils.errors import InputError
from utils.file_utils import ensure_directory
from utils.format_utils import format_gap
from utils.instance_io import format_instance, parse_instance, read_instance

REFERENCE_MODES = (
    settings.REFERENCE_ORACLE,
    settings.REFERENCE_BEST_KNOWN,
    settings.REFERENCE_BEST_OF_CONFIGS,
    settings.REFERENCE_NONE,
)
SPEC_FIELDS = ("n", "tau", "R", "family", "q", "c", "seed", "replicate")


@dataclass
class RunRecord:
    """Outcome of one solve call"""

    instance: str
    config: str
    seed: int
    fitness: float
    generations: int
    termination_reason: str
    alns_invocations: int
    accepted: int
    wall_time: float
    family: Optional[str] = None
    n: Optional[int] = None
    tau: Optional[float] = None
    R: Optional[float] = None
    q: Optional[float] = None
    c: Optional[float] = None

    def row(self):
        """CSV row without wall-clock data"""
        values = asdict(self)
        values.pop("wall_time")
        return values


@dataclass
class GridResult:
    records: List[RunRecord]
    runs: pd.DataFrame
    gaps: pd.DataFrame
    summary: pd.DataFrame
    trends: pd.DataFrame
    manifest: Dict = field(default_factory=dict)

    @property
    def metric(self):
        return reporting.value_column(self.runs)

    def timings(self):
        return pd.DataFrame(
            [{"instance": r.instance, "config": r.config, "seed": r.seed,
              "wall_time": r.wall_time, "generations": r.generations} for r in self.records],
            columns=["instance", "config", "seed", "wall_time", "generations"],
        )


def instance_group(instance):
    """Grouping fields of an instance (generator metadata when present)"""
    meta = instance.metadata
    return {
        "family": meta.get("family"),
        "n": meta.get("n", instance.n),
        "tau": meta.get("tau"),
        "R": meta.get("R"),
        "q": meta.get("q"),
        "c": meta.get("c"),
    }


def run_single(instance, tag, config, seed):
    """Solve once and record the outcome"""
    result = solve(instance, config.replace(seed=seed))
    return RunRecord(
        instance=instance.label,
        config=tag,
        seed=int(seed),
        fitness=result.best_fitness,
        generations=result.generations,
        termination_reason=result.termination_reason,
        alns_invocations=result.alns_invocations,
        accepted=result.accepted,
        wall_time=result.wall_time,
        **instance_group(instance),
    )


def instance_source(instance):
    """How the manifest rebuilds an instance: generator spec, file path or inline text"""
    meta = instance.metadata
    if all(key in meta for key in SPEC_FIELDS):
        return {"label": instance.label, "spec": {key: meta[key] for key in SPEC_FIELDS}}
    if "path" in meta:
        return {"label": instance.label, "path": meta["path"]}
    return {"label": instance.label, "text": format_instance(instance)}


def rebuild_instance(source):
    if "spec" in source:
        return generate(GenSpec(**source["spec"]))
    if "path" in source:
        return read_instance(source["path"])
    if "text" in source:
        return parse_instance(source["text"], label=source["label"])
    raise InputError(f"Manifest entry cannot be rebuilt: {source}")


def read_best_known(path):
    """Best-known values from a CSV with 'instance' and 'value' columns"""
    if not os.path.exists(path):
        raise InputError(f"Best-known file not found: {path}")
    frame = pd.read_csv(path)
    missing = {"instance", "value"} - set(frame.columns)
    if missing:
        raise InputError(f"Best-known file {path} lacks columns: {', '.join(sorted(missing))}")
    return dict(zip(frame["instance"].astype(str), frame["value"].astype(float)))


class ExperimentHarness:
    """Runs a grid of instances x configurations x seeds"""

    def __init__(self, instances, configs, seeds, reference_mode=settings.REFERENCE_BEST_OF_CONFIGS,
                 best_known=None, baseline=None, n_jobs=1):
        if reference_mode not in REFERENCE_MODES:
            raise InputError(f"Unknown reference mode: {reference_mode} (expected one of {', '.join(REFERENCE_MODES)})")
        labels = [instance.label for instance in instances]
        if len(set(labels)) != len(labels):
            raise InputError("Instance labels must be unique within a grid")
        self.instances = list(instances)
        self.configs = {tag: config.validate() for tag, config in configs.items()}
        self.seeds = [int(seed) for seed in seeds]
        self.reference_mode = reference_mode
        self.best_known = best_known or {}
        self.baseline = baseline
        self.n_jobs = n_jobs

    def jobs(self):
        return [
            (instance, tag, config, seed)
            for tag, config in self.configs.items()
            for instance in self.instances
            for seed in self.seeds
        ]

    def run(self):
        jobs = self.jobs()
        print(f"🎯 Running {len(jobs)} solves ({len(self.instances)} instances x "
              f"{len(self.configs)} configurations x {len(self.seeds)} seeds)")
        if self.n_jobs == 1:
            return [run_single(*job) for job in jobs]
        return Parallel(n_jobs=self.n_jobs)(delayed(run_single)(*job) for job in jobs)

    def references(self, runs):
        mode = self.reference_mode
        if mode == settings.REFERENCE_NONE:
            return {}
        if mode == settings.REFERENCE_BEST_OF_CONFIGS:
            return reporting.best_of_configs(runs)
        if mode == settings.REFERENCE_BEST_KNOWN:
            return {label: value for label, value in self.best_known.items()
                    if label in set(runs["instance"])}
        references = {}
        for instance in self.instances:
            if instance.n > settings.ORACLE_N_LIMIT:
                continue
            print(f"🔍 Exact search on {instance.label}")
            references[instance.label] = exact_solve(instance).optimal
        return references

    def evaluate(self, records):
        runs = pd.DataFrame([record.row() for record in records])
        runs = runs.sort_values(["config", "instance", "seed"]).reset_index(drop=True)
        if self.reference_mode == settings.REFERENCE_NONE:
            print("📊 No gap reference requested; reporting raw fitness")
        else:
            runs = reporting.attach_gaps(runs, self.references(runs))
            if runs["gap"].isna().all():
                print("⚠️ No instance has a gap reference; falling back to raw fitness")
        gaps = reporting.aggregate_gaps(runs)
        return GridResult(
            records=list(records),
            runs=runs,
            gaps=gaps,
            summary=reporting.gap_summary(gaps, self.baseline),
            trends=reporting.difficulty_trends(runs),
            manifest=self.manifest(),
        )

    def manifest(self):
        return {
            "app": settings.APP_NAME,
            "version": settings.APP_VERSION,
            "reference_mode": self.reference_mode,
            "best_known": dict(sorted(self.best_known.items())),
            "baseline": self.baseline,
            "seeds": self.seeds,
            "configs": {tag: config.to_dict() for tag, config in self.configs.items()},
            "instances": [instance_source(instance) for instance in self.instances],
            "runs": [{"instance": instance.label, "config": tag, "seed": seed}
                     for instance, tag, _, seed in self.jobs()],
        }


def run_grid(instances, configs, seeds, reference_mode=settings.REFERENCE_BEST_OF_CONFIGS,
             best_known=None, baseline=None, n_jobs=1):
    """Run every (instance, configuration, seed) and aggregate the records"""
    harness = ExperimentHarness(instances, configs, seeds, reference_mode, best_known, baseline, n_jobs)
    return harness.evaluate(harness.run())


def load_manifest(path):
    """Rebuild a harness from a manifest written by save_results"""
    if not os.path.exists(path):
        raise InputError(f"Manifest not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        manifest = json.load(f)
    instances = [rebuild_instance(source) for source in manifest["instances"]]
    for instance, source in zip(instances, manifest["instances"]):
        if instance.label != source["label"] and "spec" in source:
            raise InputError(f"Manifest instance {source['label']} regenerated as {instance.label}")
    configs = {tag: SolverConfig(**values) for tag, values in manifest["configs"].items()}
    return ExperimentHarness(
        instances, configs, manifest["seeds"],
        reference_mode=manifest.get("reference_mode", settings.REFERENCE_BEST_OF_CONFIGS),
        best_known=manifest.get("best_known"),
        baseline=manifest.get("baseline"),
    )


def replay(manifest_path, n_jobs=1):
    harness = load_manifest(manifest_path)
    harness.n_jobs = n_jobs
    return harness.evaluate(harness.run())


def format_summary_markdown(result):
    """Human-readable digest of a grid run"""
    runs = result.runs
    metric = result.metric
    manifest = result.manifest
    md = "# Benchmark Summary\n\n"
    md += f"- **Instances**: {runs['instance'].nunique()}\n"
    md += f"- **Configurations**: {', '.join(sorted(runs['config'].unique()))}\n"
    md += f"- **Seeds**: {', '.join(str(s) for s in manifest.get('seeds', []))}\n"
    md += f"- **Reference**: {manifest.get('reference_mode', 'unknown')}\n"
    md += f"- **Metric**: {metric}\n"

    md += "\n## Configurations\n\n"
    md += "| config | runs | mean fitness | mean gap (%) | ALNS passes |\n"
    md += "|---|---|---|---|---|\n"
    for config, frame in runs.groupby("config"):
        mean_gap = frame["gap"].mean() if "gap" in frame.columns else None
        md += (f"| {config} | {len(frame)} | {frame['fitness'].mean():.2f} | "
               f"{format_gap(mean_gap)} | {int(frame['alns_invocations'].sum())} |\n")

    md += "\n## Termination\n\n"
    counts = runs.groupby(["config", "termination_reason"]).size()
    for (config, reason), count in counts.items():
        md += f"- {config}: {reason} x {count}\n"

    if not result.trends.empty:
        md += "\n## Difficulty Trends (Spearman)\n\n"
        for row in result.trends.itertuples():
            md += f"- {row.config} vs {row.factor}: rho={row.rho:.3f} (p={row.p_value:.3g}, {row.instances} instances)\n"
    return md


def save_results(result, output_dir):
    """Write runs, timings, gap tables, trends, manifest and summary into output_dir"""
    ensure_directory(output_dir)
    paths = {}
    tables = {
        settings.RUNS_CSV: result.runs,
        settings.TIMINGS_CSV: result.timings(),
        settings.GAPS_CSV: result.gaps,
        settings.GAP_SUMMARY_CSV: result.summary,
        settings.TRENDS_CSV: result.trends,
    }
    for name, frame in tables.items():
        path = os.path.join(output_dir, name)
        frame.to_csv(path, index=False)
        paths[name] = path

    manifest_path = os.path.join(output_dir, settings.MANIFEST_JSON)
    with open(manifest_path, "w", encoding="utf-8") as f:
        json.dump(result.manifest, f, ensure_ascii=False, indent=2, sort_keys=True)
    paths[settings.MANIFEST_JSON] = manifest_path

    md_path = os.path.join(output_dir, settings.SUMMARY_MD)
    with open(md_path, "w", encoding="utf-8") as f:
        f.write(format_summary_markdown(result))
    paths[settings.SUMMARY_MD] = md_path

    print(f"✅ Saved {len(result.records)} run records to {output_dir}")
    return paths
