"""End-to-end experiment: split, anonymize, re-split, pair, sample, train, score.

For every strategy S the source graph is split once into (G1, G2).  For
every level L each Gi is anonymized (identity for GS, ``m`` dK-instances
otherwise), each instance is split again with the same (alpha, S) into
(G_aux, G_san), and ``ell`` balanced samples of the labeled pairs are
scored with a fresh forest.  Every stochastic stage seeds from
``(master_seed, stage tag, level, strategy, instance)`` so any slice can
be re-run alone.
"""

from __future__ import annotations

import json
import logging
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

from . import __version__
from .attack import CSV_FIELDS, build_balanced_samples, evaluate, generate_pairs, train_forest
from .attack.evaluate import write_rows
from .dissimilarity import d_measure
from .dkseries import LEVELS as DK_LEVELS
from .generate import GenParams, generate
from .graph import Graph, graph_metrics, load_edge_list
from .overlap import STRATEGIES, split
from .rng import derive_seed
from .signatures import FEATURE_LAYOUTS

log = logging.getLogger(__name__)

LEVELS = ("GS",) + DK_LEVELS


class ConfigError(ValueError):
    pass


class ReportError(OSError):
    pass


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _list(text: str) -> tuple[str, ...]:
    return tuple(x for x in text.replace(",", " ").split() if x)


def _opt_int(text: str):
    return None if text.strip().lower() in ("", "none") else int(text)


@dataclass
class ExperimentConfig:
    dataset_path: str = ""
    dataset: str = ""
    alpha: float = 0.2
    strategies: tuple[str, ...] = STRATEGIES
    dk_levels: tuple[str, ...] = LEVELS
    m: int = 4
    ell: int = 10
    sample_size: int = 200
    holdout_frac: float = 0.3
    num_bins: int = 21
    bin_size: int = 50
    feature_layout: str = "concat+absdiff"
    n_trees: int = 100
    smote_k: int = 5
    master_seed: int = 0
    pair_cap: int | None = None
    swap_budget_factor: float = 10.0
    cspec_tolerance: float = 0.01
    instance_metrics: bool = True
    dissimilarity: bool = True
    d_sample_threshold: int | None = 2000
    workers: int = 1

    def __post_init__(self):
        self.strategies = tuple(self.strategies)
        self.dk_levels = tuple(self.dk_levels)
        if not self.dataset and self.dataset_path:
            self.dataset = os.path.basename(self.dataset_path).split(".")[0]

    def validate(self) -> "ExperimentConfig":
        bad = [s for s in self.strategies if s not in STRATEGIES]
        if bad:
            raise ConfigError(f"unknown strategies {bad}; choose from {STRATEGIES}")
        bad = [lv for lv in self.dk_levels if lv not in LEVELS]
        if bad:
            raise ConfigError(f"unknown dk_levels {bad}; choose from {LEVELS}")
        for name in ("m", "ell", "sample_size", "num_bins", "bin_size", "n_trees", "smote_k", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.sample_size < 4:
            raise ConfigError("sample_size must be >= 4")
        if not 0 < self.alpha <= 1:
            raise ConfigError("alpha must be in (0, 1]")
        if not 0 < self.holdout_frac < 1:
            raise ConfigError("holdout_frac must be in (0, 1)")
        if self.pair_cap is not None and self.pair_cap < 1:
            raise ConfigError("pair_cap must be >= 1")
        if self.feature_layout not in FEATURE_LAYOUTS:
            raise ConfigError(f"feature_layout must be one of {FEATURE_LAYOUTS}")
        if not self.dataset_path:
            raise ConfigError("dataset_path is required")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["strategies"] = list(self.strategies)
        d["dk_levels"] = list(self.dk_levels)
        return d


_PARSERS = {
    "alpha": float, "holdout_frac": float, "swap_budget_factor": float, "cspec_tolerance": float,
    "m": int, "ell": int, "sample_size": int, "num_bins": int, "bin_size": int, "n_trees": int,
    "smote_k": int, "master_seed": int, "workers": int,
    "pair_cap": _opt_int, "d_sample_threshold": _opt_int,
    "strategies": _list, "dk_levels": _list,
    "instance_metrics": _bool, "dissimilarity": _bool,
    "dataset_path": str.strip, "dataset": str.strip, "feature_layout": str.strip,
}
CONFIG_KEYS = tuple(f.name for f in fields(ExperimentConfig))
assert set(_PARSERS) == set(CONFIG_KEYS)


def parse_value(key: str, text: str):
    if key not in _PARSERS:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        return _PARSERS[key](text)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from None


def parse_config_text(text: str, base_dir: str = "") -> dict:
    """``key = value`` lines; '#' starts a comment; blank lines ignored."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key] = parse_value(key, value)
    if base_dir and out.get("dataset_path") and not os.path.isabs(out["dataset_path"]):
        out["dataset_path"] = os.path.join(base_dir, out["dataset_path"])
    return out


def load_config(path: str, overrides: dict | None = None) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    values = parse_config_text(text, os.path.dirname(os.path.abspath(path)))
    values.update(overrides or {})
    return ExperimentConfig(**values).validate()


# -- report ----------------------------------------------------------------

@dataclass
class ExperimentReport:
    config: dict
    version: str
    source: dict
    results: list[dict] = field(default_factory=list)     # one per (level, strategy)
    instances: list[dict] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)
    created: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(**d)

    def f1_values(self, level: str, strategy: str) -> list[float]:
        for r in self.results:
            if r["level"] == level and r["strategy"] == strategy:
                return [row["f1"] for row in r["samples"]]
        return []

    def rows(self) -> list[dict]:
        return [row for r in self.results for row in r["samples"]]

    @property
    def status(self) -> str:
        if not self.errors:
            return "ok"
        return "failed" if not self.rows() else "partial"


def emit_report(r: ExperimentReport, out_dir: str) -> tuple[str, str]:
    """Write ``report.json`` and ``f1.csv`` into an existing directory."""
    if not os.path.isdir(out_dir):
        raise ReportError(f"output directory does not exist: {out_dir}")
    rpath = os.path.join(out_dir, "report.json")
    cpath = os.path.join(out_dir, "f1.csv")
    try:
        with open(rpath, "w", encoding="utf-8") as fh:
            json.dump(r.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")
        write_rows(cpath, r.rows())
    except OSError as exc:
        raise ReportError(f"cannot write report to {exc.filename or out_dir}: {exc.strerror}") from None
    return rpath, cpath


def load_report(path: str) -> ExperimentReport:
    with open(path, encoding="utf-8") as fh:
        return ExperimentReport.from_dict(json.load(fh))


# -- pipeline --------------------------------------------------------------

def _metrics(g: Graph) -> dict:
    return graph_metrics(g).to_dict()


def _instance_task(cfg: ExperimentConfig, level: str, strategy: str, part: int, j: int,
                   gi: Graph) -> dict:
    """Anonymize one subgraph, re-split it and score ``ell`` samples."""
    ms = cfg.master_seed
    iid = f"g{part}" if level == "GS" else f"g{part}.{j}"
    info: dict = {"level": level, "strategy": strategy, "instance_id": iid}
    stage = "generate"
    try:
        if level == "GS":
            inst = gi
        else:
            params = GenParams(level=level, rng_seed=derive_seed(ms, "generate", level, strategy, part, j),
                               swap_budget_factor=cfg.swap_budget_factor,
                               cspec_tolerance=cfg.cspec_tolerance)
            res = generate(gi, params)
            inst = res.graph
            info["generation"] = {k: v for k, v in res.sidecar().items() if k != "params"}
            info["generation"]["rng_seed"] = params.rng_seed
            if cfg.dissimilarity:
                stage = "dissimilarity"
                info["dissimilarity"] = d_measure(gi, inst, sample_threshold=cfg.d_sample_threshold,
                                                  seed=ms).to_dict()
        stage = "split"
        sp = split(inst, cfg.alpha, strategy, derive_seed(ms, "resplit", level, strategy, iid))
        g_aux, g_san = sp.g1, sp.g2
        if cfg.instance_metrics:
            stage = "metrics"
            info["san_metrics"] = _metrics(g_san)
            info["aux_metrics"] = _metrics(g_aux)
        stage = "pairs"
        pop = generate_pairs(g_san, g_aux, cfg.pair_cap, derive_seed(ms, "pairs", level, strategy, iid),
                             cfg.bin_size, cfg.num_bins, cfg.feature_layout)
        info["pairs"] = {"total": len(pop), "identical": pop.n_identical,
                         "non_identical": len(pop) - pop.n_identical}
        stage = "sampling"
        samples = build_balanced_samples(pop, cfg.ell, cfg.sample_size, cfg.holdout_frac,
                                         derive_seed(ms, "samples", level, strategy, iid), cfg.smote_k)
        stage = "attack"
        rows = []
        for sid, s in enumerate(samples):
            forest = train_forest(s, cfg.n_trees, derive_seed(s.seed, "forest"))
            ev = evaluate(forest, s.test)
            rows.append({"dataset": cfg.dataset, "dk_level": level, "strategy": strategy,
                         "instance_id": iid, "sample_id": sid, **ev.to_dict()})
        info["rows"] = rows
    except Exception as exc:  # recorded per instance, siblings continue
        log.warning("%s/%s/%s failed in %s: %s", level, strategy, iid, stage, exc)
        info["error"] = {"level": level, "strategy": strategy, "instance_id": iid,
                         "stage": stage, "error": f"{type(exc).__name__}: {exc}"}
    return info


def _tasks(cfg: ExperimentConfig, g: Graph, errors: list):
    for strategy in cfg.strategies:
        try:
            sp = split(g, cfg.alpha, strategy, derive_seed(cfg.master_seed, "split", strategy))
        except Exception as exc:
            for level in cfg.dk_levels:
                errors.append({"level": level, "strategy": strategy, "instance_id": None,
                               "stage": "split", "error": f"{type(exc).__name__}: {exc}"})
            continue
        for level in cfg.dk_levels:
            reps = 1 if level == "GS" else cfg.m
            for part, gi in ((1, sp.g1), (2, sp.g2)):
                for j in range(reps):
                    yield (level, strategy, part, j, gi)


def run_experiment(cfg: ExperimentConfig, graph: Graph | None = None) -> ExperimentReport:
    """Run every (level, strategy) configuration; failures are recorded, not raised."""
    cfg.validate()
    g = graph if graph is not None else load_edge_list(cfg.dataset_path)
    errors: list[dict] = []
    tasks = list(_tasks(cfg, g, errors))
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            infos = list(ex.map(_instance_task, *zip(*[(cfg, *t) for t in tasks])))
    else:
        infos = [_instance_task(cfg, *t) for t in tasks]

    results = []
    by_key: dict = {}
    for level in cfg.dk_levels:
        for strategy in cfg.strategies:
            entry = {"level": level, "strategy": strategy, "samples": []}
            by_key[(level, strategy)] = entry
            results.append(entry)
    instances = []
    for info in infos:
        if "error" in info:
            errors.append(info.pop("error"))
        by_key[(info["level"], info["strategy"])]["samples"].extend(info.pop("rows", []))
        instances.append(info)
    for entry in results:
        f1 = [row["f1"] for row in entry["samples"]]
        entry["n_f1"] = len(f1)
        entry["trees"] = len(f1) * cfg.n_trees
        entry["median_f1"] = statistics.median(f1) if f1 else None
    source = {"n_nodes": g.n_nodes, "n_edges": g.n_edges}
    return ExperimentReport(cfg.to_dict(), __version__, source, results, instances, errors, time.time())


__all__ = ["CONFIG_KEYS", "CSV_FIELDS", "ConfigError", "ExperimentConfig", "ExperimentReport",
           "LEVELS", "ReportError", "emit_report", "load_config", "load_report",
           "parse_config_text", "run_experiment"]
