"""Command-line front end: ``spikeid {simulate,estimate,compare,window,replay}``.

Exit codes: 0 success, 2 data error, 3 model failure, 4 configuration error.
Every run writes ``manifest.json`` into its output directory; ``spikeid
replay manifest.json`` re-executes the recorded run.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .exceptions import (
    ConfigError,
    DataQualityError,
    DegenerateInputError,
    EstimationError,
    ModelFailureError,
    NumericalFailureError,
)
from .fileio import (
    FORMATS,
    dump_json,
    emit,
    format_report,
    ingest,
    sha256_file,
    write_table,
    write_text,
)
from .spike import IDConfig, IDReport
from .study import COMPARE_COLUMNS, DEFAULT_SNRS, compare_counts, simulation_config, snr_label
from .simulator import simulate
from .svg import spectrum_svg, step_svg
from .windows import estimate_id, sliding_id

EXIT_OK, EXIT_DATA, EXIT_MODEL, EXIT_CONFIG = 0, 2, 3, 4
NOISE_CHOICES = ("fft", "residual", "threshold", "none", "brute")
_RAW_SUFFIX = {"csv": ".csv", "raw-f64": ".f64"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors are configuration errors, not argparse's exit 2
        raise ConfigError(f"{self.prog}: {message}")


def _snr(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid SNR {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("SNR must be positive (inf for noise-free)")
    return v


def _positive(kind):
    def parse(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"expected a positive value, got {text}")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", default=".", help="directory for every output file")
    common.add_argument("--seed", type=int, default=0, help="master seed for every random stage")
    est = argparse.ArgumentParser(add_help=False)
    est.add_argument("--noise-method", choices=NOISE_CHOICES, default="fft")
    est.add_argument("--epsilon0", type=_positive(float), help="search step (default: smallest eigenvalue)")
    est.add_argument("--delta", type=float, help="fixed spike/bulk cut instead of the gap walk")
    est.add_argument("--stop-rule", choices=("span", "fraction"), default="fraction")
    est.add_argument("--fraction-p", type=_positive(float), default=0.4)
    est.add_argument("--mc-samples", type=_positive(int), default=100)
    est.add_argument("--dist", choices=("gaussian", "uniform", "t"), default="gaussian")
    est.add_argument("--discrepancy", choices=("mean", "spectrum"), default="mean")
    est.add_argument("--strict-pure-noise", action="store_true",
                     help="fail (exit 3) instead of reporting L = 0 when no spike is separable")
    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", required=True)
    data.add_argument("--format", choices=FORMATS, default="csv")
    data.add_argument("--sample-period-ms", type=_positive(float), default=1.0)
    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--snr", type=_snr, action="append", help="repeatable; default inf 1 .1 .01 .001 .0001")
    sim.add_argument("--orientation", choices=("radial", "z"), default="radial",
                     help="measured field component at each sensor")
    sim.add_argument("--n-samples", type=_positive(int), default=1000)
    sim.add_argument("--n-trials", type=_positive(int), default=5)

    p = _Parser(prog="spikeid", description="Count sources via spiked eigenvalues of whitened covariances.")
    p.add_argument("--version", action="version", version=f"spikeid {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", parents=[common, sim], help="dipole simulation per SNR")
    s.add_argument("--format", choices=FORMATS, default="csv", help="format of the simulated recordings")
    sub.add_parser("estimate", parents=[common, est, data], help="intrinsic dimensionality of one recording")
    sub.add_parser("compare", parents=[common, est, sim], help="baseline vs spiked counts across SNRs")
    w = sub.add_parser("window", parents=[common, est, data], help="counts on sliding windows")
    w.add_argument("--window-ms", type=_positive(float), default=2000.0)
    w.add_argument("--stride-ms", type=_positive(float), default=600.0)
    w.add_argument("--global-noise", action="store_true", help="one noise estimate for all windows")
    w.add_argument("--plot", action="store_true", help="also write an SVG step plot")
    r = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    r.add_argument("manifest")
    r.add_argument("--output-dir", help="override the recorded output directory")
    return p


def _id_config(args) -> IDConfig:
    return IDConfig(
        epsilon0=args.epsilon0,
        delta=args.delta,
        stop_rule=args.stop_rule,
        fraction_p=args.fraction_p,
        mc_samples=args.mc_samples,
        dist=args.dist,
        discrepancy=args.discrepancy,
        strict=args.strict_pure_noise,
        seed=args.seed,
    )


def _report_items(rep: IDReport, noise_method: str) -> dict:
    d = rep.as_dict()
    items = {"noise_method": noise_method}
    items.update(d)
    items["n_epsilon_candidates"] = len(items.pop("epsilon_candidates"))
    items.pop("discrepancy_trace")
    items["assumption_warnings"] = "; ".join(rep.assumption_warnings)
    items["warnings"] = "; ".join(rep.warnings)
    return items


def _eigen_rows(rep: IDReport):
    labels = rep.group_labels()
    for rank, (lam, gid) in enumerate(zip(rep.sample_eigenvalues, labels), start=1):
        est = rep.estimated_spikes[gid - 1] if gid else None
        yield rank, float(lam), int(gid), est


def _spectrum_plot(rep: IDReport) -> str:
    crosses = [(i + 1, rep.estimated_spikes[l]) for l, g in enumerate(rep.groups) for i in g]
    last = max((i + 1 for g in rep.groups for i in g), default=0)
    n_show = min(len(rep.sample_eigenvalues), max(2 * last, 20))
    return spectrum_svg(rep.sample_eigenvalues, crosses, n_show)


def _run_simulate(args, out: Path) -> list[Path]:
    files = []
    snrs = args.snr or list(DEFAULT_SNRS)
    for snr in snrs:
        res = simulate(simulation_config(snr, args.seed, args.orientation,
                                         n_samples=args.n_samples, n_trials=args.n_trials))
        stem = f"sim_snr-{snr_label(snr)}"
        files.append(emit(out / (stem + _RAW_SUFFIX[args.format]), res.averaged, args.format))
        files.append(emit(out / f"{stem}_clean.csv", res.clean_signal, "csv"))
        truth = {
            "n_dipoles": res.n_dipoles,
            "snr": snr_label(snr),
            "clean_signal": f"{stem}_clean.csv",
            "noise_variances": [float(v) for v in res.noise_variances],
            "warnings": list(res.warnings),
        }
        files.append(write_text(out / f"{stem}_truth.json", dump_json(truth)))
        sensors = res.sensors
    files.append(write_table(out / "sensors.csv", ["x_mm", "y_mm", "z_mm", "ox", "oy", "oz"],
                             np.hstack([sensors.positions, sensors.orientations]).tolist()))
    return files


def _run_estimate(args, out: Path) -> list[Path]:
    data = ingest(args.input, args.format, args.sample_period_ms)
    rep = estimate_id(data, args.noise_method, _id_config(args))
    for msg in rep.warnings + rep.assumption_warnings:
        print(f"warning: {msg}", file=sys.stderr)
    return [
        write_text(out / "report.txt", format_report(_report_items(rep, args.noise_method))),
        write_table(out / "eigenvalues.csv", ["rank", "eigenvalue", "group", "estimate"], _eigen_rows(rep)),
        write_table(out / "discrepancy.csv", ["epsilon", "discrepancy"],
                    zip(rep.epsilon_candidates, rep.discrepancy_trace)),
        write_text(out / "spectrum.svg", _spectrum_plot(rep)),
    ]


def _run_compare(args, out: Path) -> list[Path]:
    snrs = args.snr or list(DEFAULT_SNRS)
    cfg = _id_config(args)
    rows = []
    for snr in snrs:
        res = simulate(simulation_config(snr, args.seed, args.orientation,
                                         n_samples=args.n_samples, n_trials=args.n_trials))
        counts = compare_counts(res.averaged, cfg)
        rows.append([snr_label(snr)] + [counts[c] for c in COMPARE_COLUMNS[1:]])
    return [write_table(out / "compare.csv", COMPARE_COLUMNS, rows)]


def _run_window(args, out: Path) -> list[Path]:
    data = ingest(args.input, args.format, args.sample_period_ms)
    cfg = _id_config(args)
    header = ["t_start_ms", "t_end_ms", "L"]
    moving = sliding_id(data, args.window_ms, args.stride_ms, args.noise_method, cfg, args.global_noise)
    equi = sliding_id(data, args.window_ms, args.window_ms, args.noise_method, cfg, args.global_noise,
                      scheme="equidistant")
    files = [
        write_table(out / "windows_moving.csv", header, moving.rows()),
        write_table(out / "windows_equidistant.csv", header, equi.rows()),
    ]
    if args.plot:
        files.append(write_text(out / "windows.svg",
                                step_svg({"moving": moving.rows(), "equidistant": equi.rows()})))
    return files


_RUNNERS = {"simulate": _run_simulate, "estimate": _run_estimate, "compare": _run_compare, "window": _run_window}


def _recorded_config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("command", "output_dir")}
    if cfg.get("input") is not None:
        cfg["input"] = str(Path(cfg["input"]).resolve())
    if cfg.get("snr") is not None:
        cfg["snr"] = [snr_label(s) for s in cfg["snr"]]
    return cfg


def _argv_from_config(command: str, cfg: dict, output_dir: str) -> list[str]:
    argv = [command, "--output-dir", output_dir]
    for key, val in sorted(cfg.items()):
        flag = "--" + key.replace("_", "-")
        if val is None or val is False:
            continue
        if val is True:
            argv.append(flag)
        elif isinstance(val, list):
            for v in val:
                argv += [flag, str(v)]
        else:
            argv += [flag, repr(val) if isinstance(val, float) else str(val)]
    return argv


def _execute(args) -> int:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        files = _RUNNERS[args.command](args, out)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    manifest = {
        "tool": "spikeid",
        "version": __version__,
        "command": args.command,
        "master_seed": args.seed,
        "config": _recorded_config(args),
        "outputs": {p.name: sha256_file(p) for p in files},
    }
    write_text(out / "manifest.json", dump_json(manifest))
    return EXIT_OK


def _replay(args, parser) -> int:
    try:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        command, cfg = manifest["command"], manifest["config"]
    except (OSError, ValueError, KeyError) as exc:
        raise DataQualityError(f"unreadable manifest {args.manifest}: {exc}") from None
    output_dir = args.output_dir or str(Path(args.manifest).resolve().parent)
    return _execute(parser.parse_args(_argv_from_config(command, cfg, output_dir)))


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "replay":
            return _replay(args, parser)
        return _execute(args)
    except ModelFailureError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_MODEL
    except (EstimationError, NumericalFailureError) as exc:
        print(f"model failure: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataQualityError, DegenerateInputError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
