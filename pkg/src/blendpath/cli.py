"""Command-line front end: ``blendpath run|compare|sweep``."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
import warnings
from dataclasses import fields

from .config import ConfigError, KEYS, UnknownKey, load_config, load_track, set_value, to_sim_config
from .geometry import GeometryError, read_track
from .simulator import (NeverConverged, SimulationAborted, SummaryMetrics, compare_controllers,
                        compute_metrics, run_scenario)

log = logging.getLogger("blendpath")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

METRIC_FIELDS = tuple(f.name for f in fields(SummaryMetrics))
# short names accepted by --metric
METRIC_ALIASES = {
    "mean_abs": "mean_abs_lateral_error",
    "rms": "rms_lateral_error",
    "max_abs": "max_abs_lateral_error",
    "mean_signed": "mean_signed_lateral_error",
    "smoothness": "steering_smoothness",
}


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return f"{float(value):.9g}"


def _prepare(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = set_value(cfg, "seed", args.seed)
    track = read_track(args.track) if args.track else load_track(cfg)
    return cfg, track


def _metrics(trace):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NeverConverged)
        m = compute_metrics(trace)
    for w in caught:
        log.warning("%s", w.message)
    return m


def cmd_run(args) -> int:
    cfg, track = _prepare(args)
    trace = run_scenario(to_sim_config(cfg, track))
    if args.out:
        trace.write_csv(args.out)
    for name, value in _metrics(trace).as_dict().items():
        print(f"{name} = {_fmt(value)}")
    return EXIT_OK


def _metric_name(name: str) -> str:
    name = METRIC_ALIASES.get(name, name)
    if name not in METRIC_FIELDS:
        raise ConfigError(f"unknown metric {name!r}; choose from {', '.join(METRIC_FIELDS)}")
    return name


def comparison_csv(results: dict[str, SummaryMetrics]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("law",) + METRIC_FIELDS)
    for law, m in results.items():
        writer.writerow([law] + [_fmt(v) for v in m.as_dict().values()])
    return buf.getvalue()


def comparison_table(results: dict[str, SummaryMetrics]) -> str:
    rows = [("law",) + METRIC_FIELDS]
    rows += [(law,) + tuple(_fmt(v) for v in m.as_dict().values()) for law, m in results.items()]
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) if i == 0 else cell.rjust(w)
                       for i, (cell, w) in enumerate(zip(row, widths))).rstrip()
             for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def cmd_compare(args) -> int:
    metric = _metric_name(args.metric)
    cfg, track = _prepare(args)
    results = compare_controllers(to_sim_config(cfg, track))
    # stable sort keeps the fixed law order on ties
    results = dict(sorted(results.items(), key=lambda kv: getattr(kv[1], metric)))
    sys.stdout.write(comparison_table(results))
    text = comparison_csv(results)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write("\n" + text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if not args.sweep_key or args.sweep_values is None:
        raise ConfigError("sweep needs --sweep-key and --sweep-values")
    cfg, track = _prepare(args)
    key = args.sweep_key
    if key not in KEYS:
        raise UnknownKey(f"unknown key {key!r}")
    if KEYS[key].kind not in (int, float):
        raise ConfigError(f"{key} is not numeric")
    raw_values = [v.strip() for v in args.sweep_values.split(",") if v.strip()]
    if not raw_values:
        raise ConfigError("--sweep-values is empty")
    # validate every value before running anything
    configs = [(raw, to_sim_config(set_value(cfg, key, raw), track)) for raw in raw_values]
    configs.sort(key=lambda item: float(item[0]))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow((key,) + METRIC_FIELDS)
    for raw, sim in configs:
        m = _metrics(run_scenario(sim))
        writer.writerow([raw] + [_fmt(v) for v in m.as_dict().values()])
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blendpath",
                                     description="Blended control-point path tracking simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="flat key = value config file")
        p.add_argument("--track", help="track file, overrides track_file")
        p.add_argument("--out", help="output file")
        p.add_argument("--seed", type=int, help="overrides the config seed")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("run", help="one scenario: trace CSV and metrics")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="proposed alpha = 0, 0.5, 1 against Stanley and pure pursuit")
    common(p)
    p.add_argument("--metric", default="mean_abs_lateral_error", help="sort column")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="metrics for each value of one config key")
    common(p)
    p.add_argument("--sweep-key")
    p.add_argument("--sweep-values", help="comma separated")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, GeometryError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationAborted as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
