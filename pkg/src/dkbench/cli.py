"""``bench`` command line.

Exit codes: 0 success, 1 config/parse/usage error, 2 every configuration
failed, 3 some configurations failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .bench import (CONFIG_KEYS, ConfigError, ReportError, emit_report, load_config,
                    parse_value, run_experiment)
from .dkseries import LEVELS as DK_LEVELS
from .generate import GenerationError, GenParams, generate
from .graph import EdgeListParseError, graph_metrics, load_edge_list, save_edge_list

EXIT_OK, EXIT_CONFIG, EXIT_FAILED, EXIT_PARTIAL = 0, 1, 2, 3


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bench", description="dK-anonymization re-identification benchmark")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="run an experiment from a config file")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True, help="existing output directory")
    run.add_argument("--seed", dest="master_seed", metavar="N")
    run.add_argument("--levels", dest="dk_levels", nargs="+", metavar="LEVEL")
    run.add_argument("--strategies", nargs="+", metavar="S")
    for key in CONFIG_KEYS:
        if key not in ("master_seed", "dk_levels", "strategies"):
            run.add_argument(f"--{key}", dest=key, metavar="VALUE")
    # long-form aliases for the three keys that have short flags
    run.add_argument("--master_seed", dest="master_seed", help=argparse.SUPPRESS)
    run.add_argument("--dk_levels", dest="dk_levels", nargs="+", help=argparse.SUPPRESS)

    met = sub.add_parser("metrics", help="print graph metrics as JSON")
    met.add_argument("--graph", required=True)

    gen = sub.add_parser("generate", help="write one dK-random instance")
    gen.add_argument("--graph", required=True)
    gen.add_argument("--level", required=True, choices=DK_LEVELS)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="edge-list path; a .json sidecar is written next to it")
    return ap


def _overrides(ns) -> dict:
    out = {}
    for key in CONFIG_KEYS:
        v = getattr(ns, key, None)
        if v is None:
            continue
        out[key] = parse_value(key, " ".join(v) if isinstance(v, list) else v)
    return out


def _cmd_run(ns) -> int:
    cfg = load_config(ns.config, _overrides(ns))
    if not os.path.isdir(ns.out):
        raise ReportError(f"output directory does not exist: {ns.out}")
    try:
        report = run_experiment(cfg)
    except (OSError, EdgeListParseError) as exc:
        raise ConfigError(f"cannot load dataset {cfg.dataset_path}: {exc}") from None
    emit_report(report, ns.out)
    for e in report.errors:
        print(f"error: {e['level']}/{e['strategy']}/{e['instance_id']} ({e['stage']}): {e['error']}",
              file=sys.stderr)
    return {"ok": EXIT_OK, "partial": EXIT_PARTIAL, "failed": EXIT_FAILED}[report.status]


def _cmd_metrics(ns) -> int:
    g = load_edge_list(ns.graph)
    print(json.dumps(graph_metrics(g).to_dict(), sort_keys=True))
    return EXIT_OK


def _cmd_generate(ns) -> int:
    g = load_edge_list(ns.graph)
    try:
        res = generate(g, GenParams(level=ns.level, rng_seed=ns.seed))
    except GenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    save_edge_list(res.graph, ns.out)
    with open(ns.out + ".json", "w", encoding="utf-8") as fh:
        json.dump(res.sidecar(), fh, indent=1, sort_keys=True)
    if res.status != "ok":
        print(f"note: generator status {res.status} (phases: {', '.join(res.phases)})", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "metrics": _cmd_metrics, "generate": _cmd_generate}[ns.cmd]
    try:
        return handler(ns)
    except (ConfigError, ReportError, EdgeListParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
