"""Command-line harness: synth, detect, score, train, report.

Every flag can also come from a key=value config file (--config); command
line values win. Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .circuits import CircuitConfig
from .data import (
    DataError,
    LabeledSeries,
    SYNTH_KINDS,
    load_series_csv,
    normalize,
    save_series_csv,
    synth_series,
)
from .detector import (
    SCORE_DISTANCE,
    SCORE_LOSS,
    THRESHOLD_DYNAMIC,
    THRESHOLD_STATIC,
    DetectorConfig,
    detect_stream,
)
from .gan import QganConfig, QganModel, load_checkpoint, save_checkpoint, train
from .plots import render_detection_figure
from .report import FORMAT_CSV, FORMAT_JSON, emit_report, read_report_csv
from .scoring import flags_from_records, score_nab_windows

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip() != ""]


def _add_model_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--window", type=int, default=10, help="context window length (default 10)")
    sub.add_argument("--qubits", type=int, default=2, help="qubits per agent (default 2)")
    sub.add_argument("--final-blocks", type=int, default=1, help="trailing variational blocks")
    sub.add_argument("--learning-rate", type=float, default=0.005)
    sub.add_argument("--training-counts", type=_int_list, default=[1, 1, 1],
                     help="per-phase sample counts, e.g. 1,1,1")
    sub.add_argument("--fidelity-shots", type=int, default=None,
                     help="estimate fidelities from this many shots (default: exact)")
    sub.add_argument("--fidelity-seed", type=int, default=0)
    sub.add_argument("--fidelity-clamp", type=float, default=1e-9)


def _add_bounds_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--bounds-min", type=float, default=None)
    sub.add_argument("--bounds-max", type=float, default=None)


def _add_detector_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--epsilon", type=float, default=0.05)
    sub.add_argument("--step-multiplier", type=float, default=10.0)
    sub.add_argument("--threshold-base", type=float, default=0.3)
    sub.add_argument("--threshold-gain", type=float, default=2.0)
    sub.add_argument("--quantile-p", type=float, default=0.95)
    sub.add_argument("--noise-window", type=int, default=500)
    sub.add_argument("--variation-radius", type=int, default=2)
    sub.add_argument("--prune-steps", type=int, default=30)
    sub.add_argument("--threshold-mode", choices=[THRESHOLD_DYNAMIC, THRESHOLD_STATIC],
                     default=THRESHOLD_DYNAMIC)
    sub.add_argument("--static-threshold", type=float, default=0.3)
    sub.add_argument("--score-mode", choices=[SCORE_LOSS, SCORE_DISTANCE], default=SCORE_LOSS)


def build_parser() -> _Parser:
    parser = _Parser(prog="qgad", description=__doc__)
    parser.add_argument("--config", default=None, help="key=value file supplying flag defaults")
    subs = parser.add_subparsers(dest="command", required=True)

    p_synth = subs.add_parser("synth", parents=[], help="generate a labeled synthetic series")
    p_synth.add_argument("--kind", choices=[k.replace("_", "-") for k in SYNTH_KINDS],
                         default="level-shift")
    p_synth.add_argument("--length", type=int, default=1000)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--anomaly-times", type=_int_list, default=[600])
    p_synth.add_argument("--noise-sigma", type=float, default=0.01)
    p_synth.add_argument("--base-level", type=float, default=0.3)
    p_synth.add_argument("--shift-level", type=float, default=0.7)
    p_synth.add_argument("--spike-height", type=float, default=0.4)
    p_synth.add_argument("--period", type=float, default=8.0)
    p_synth.add_argument("--amplitude", type=float, default=0.15)
    p_synth.add_argument("--window-half-width", type=int, default=25)
    p_synth.add_argument("--out", required=True, help="output CSV path")

    p_train = subs.add_parser("train", help="offline training on a series")
    p_train.add_argument("--data", required=True, help="input CSV")
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--epochs", type=int, default=1)
    p_train.add_argument("--limit", type=int, default=None,
                         help="train on at most this many (context, target) pairs")
    p_train.add_argument("--checkpoint", required=True, help="output checkpoint path")
    _add_model_flags(p_train)
    _add_bounds_flags(p_train)

    p_detect = subs.add_parser("detect", help="stream detection over a series")
    p_detect.add_argument("--data", required=True, help="input CSV")
    p_detect.add_argument("--seed", type=int, default=0)
    p_detect.add_argument("--checkpoint", default=None, help="start from a trained checkpoint")
    p_detect.add_argument("--save-checkpoint", default=None,
                          help="write the post-stream model here")
    p_detect.add_argument("--out", required=True, help="output report CSV")
    p_detect.add_argument("--json", dest="json_out", default=None, help="also emit JSON here")
    p_detect.add_argument("--plot", default=None, help="also render a PNG overview here")
    _add_model_flags(p_detect)
    _add_bounds_flags(p_detect)
    _add_detector_flags(p_detect)

    p_score = subs.add_parser("score", help="score a report CSV against label windows")
    p_score.add_argument("--report", required=True, help="report CSV from detect")
    p_score.add_argument("--labels", required=True, help="labels JSON with 'windows'")
    p_score.add_argument("--length", type=int, default=None,
                         help="series length (default: last record index + 1)")
    p_score.add_argument("--seed", type=int, default=0, help="unused; accepted for uniformity")

    p_report = subs.add_parser("report", help="re-emit a report and render figures")
    p_report.add_argument("--report", required=True, help="report CSV from detect")
    p_report.add_argument("--labels", default=None, help="optional labels JSON")
    p_report.add_argument("--length", type=int, default=None)
    p_report.add_argument("--format", choices=[FORMAT_CSV, FORMAT_JSON], default=FORMAT_JSON)
    p_report.add_argument("--out", required=True, help="output path for the converted report")
    p_report.add_argument("--no-plot", action="store_true", help="skip the PNG figure")
    p_report.add_argument("--plot", default=None,
                          help="figure path (default: output path with .png suffix)")
    p_report.add_argument("--seed", type=int, default=0, help="unused; accepted for uniformity")

    return parser


def _apply_config_file(parser: _Parser, argv: list[str]) -> None:
    """Load key=value defaults from --config into every matching flag."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    path = Path(known.config)
    if not path.is_file():
        raise DataError(f"no such config file: {path}")
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise DataError(f"{path}: line {lineno}: expected key=value")
        key, value = stripped.split("=", 1)
        pairs[key.strip().replace("-", "_")] = value.strip()

    def walk(p: argparse.ArgumentParser) -> None:
        for action in p._actions:
            if isinstance(action, argparse._SubParsersAction):
                for child in action.choices.values():
                    walk(child)
            elif action.dest in pairs:
                raw = pairs[action.dest]
                if action.type is not None:
                    action.default = action.type(raw)
                elif isinstance(action, (argparse._StoreTrueAction,)):
                    action.default = raw.lower() in ("1", "true", "yes")
                else:
                    action.default = raw
                if action.required:
                    action.required = False

    try:
        walk(parser)
    except (TypeError, ValueError) as exc:
        raise DataError(f"{path}: bad value: {exc}") from None


def _bounds_from_args(args) -> tuple[float, float] | None:
    if args.bounds_min is None and args.bounds_max is None:
        return None
    if args.bounds_min is None or args.bounds_max is None:
        raise DataError("give both --bounds-min and --bounds-max or neither")
    return (args.bounds_min, args.bounds_max)


def _model_from_args(args) -> QganModel:
    circuit = CircuitConfig(
        agent_qubits=args.qubits, layers=args.window, final_blocks=args.final_blocks
    )
    config = QganConfig(
        circuit=circuit,
        window=args.window,
        learning_rate=args.learning_rate,
        epochs=getattr(args, "epochs", 1),
        training_counts=tuple(args.training_counts),
        fidelity_shots=args.fidelity_shots,
        fidelity_seed=args.fidelity_seed,
        fidelity_clamp=args.fidelity_clamp,
    )
    return QganModel.initialize(config, args.seed)


def _detector_from_args(args) -> DetectorConfig:
    return DetectorConfig(
        window=args.window,
        epsilon=args.epsilon,
        step_multiplier=args.step_multiplier,
        threshold_base=args.threshold_base,
        threshold_gain=args.threshold_gain,
        quantile_p=args.quantile_p,
        noise_window=args.noise_window,
        variation_radius=args.variation_radius,
        prune_steps=args.prune_steps,
        threshold_mode=args.threshold_mode,
        static_threshold=args.static_threshold,
        score_mode=args.score_mode,
    )


def _training_pairs(values: np.ndarray, window: int, limit: int | None):
    pairs = []
    for t in range(window, values.size):
        pairs.append((values[t - window : t][::-1].copy(), float(values[t])))
    if limit is not None:
        pairs = pairs[:limit]
    return pairs


def _load_windows(path) -> list[tuple[int, int]]:
    import json

    raw = json.loads(Path(path).read_text())
    return [(int(w[0]), int(w[1])) for w in raw.get("windows", [])]


def _cmd_synth(args) -> int:
    series = synth_series(
        args.kind.replace("-", "_"),
        length=args.length,
        seed=args.seed,
        anomaly_times=args.anomaly_times,
        noise_sigma=args.noise_sigma,
        base_level=args.base_level,
        shift_level=args.shift_level,
        spike_height=args.spike_height,
        period=args.period,
        amplitude=args.amplitude,
        window_half_width=args.window_half_width,
    )
    out = save_series_csv(series, args.out)
    print(f"wrote {out} ({series.values.size} rows, {len(series.anomaly_windows)} window(s))")
    return EXIT_OK


def _cmd_train(args) -> int:
    series = load_series_csv(args.data, bounds=_bounds_from_args(args))
    values = normalize(series.values, series.bounds)
    if values.size <= args.window:
        raise DataError(f"series too short for window {args.window}")
    model = _model_from_args(args)
    pairs = _training_pairs(values, args.window, args.limit)
    history = train(model, pairs, epochs=args.epochs)
    out = save_checkpoint(model, args.checkpoint)
    summary = []
    for name, losses in (("dx", history.dx), ("gd", history.gd), ("dg", history.dg)):
        if losses:
            summary.append(f"{name} {losses[0]:.4f}->{losses[-1]:.4f}")
    print(f"trained on {len(pairs)} pairs; " + ", ".join(summary))
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_detect(args) -> int:
    series = load_series_csv(args.data, bounds=_bounds_from_args(args))
    values = normalize(series.values, series.bounds)
    if args.checkpoint:
        model = load_checkpoint(args.checkpoint)
        if model.config.window != args.window:
            raise DataError(
                f"checkpoint window {model.config.window} != requested {args.window}"
            )
    else:
        model = _model_from_args(args)
    config = _detector_from_args(args)
    records = detect_stream(values, model, config)
    score = None
    if series.anomaly_windows:
        flags = flags_from_records(records, values.size)
        score = score_nab_windows(flags, series.anomaly_windows)
    out = emit_report(records, score, FORMAT_CSV, args.out)
    print(f"wrote {out} ({len(records)} records)")
    if args.json_out:
        print(f"wrote {emit_report(records, score, FORMAT_JSON, args.json_out)}")
    if args.plot:
        print(f"wrote {render_detection_figure(records, series.anomaly_windows, args.plot)}")
    if args.save_checkpoint:
        print(f"wrote {save_checkpoint(model, args.save_checkpoint)}")
    if score is not None:
        print(
            f"score: anomalies={score.num_anomalies} positives={score.num_positives} "
            f"tp={score.true_positives} fp={score.false_positives} fn={score.false_negatives}"
        )
    return EXIT_OK


def _score_from_files(report_path, labels_path, length: int | None):
    records = read_report_csv(report_path)
    windows = _load_windows(labels_path) if labels_path else []
    if length is None:
        length = max(rec.t for rec in records) + 1
    flags = flags_from_records(records, length)
    return records, windows, score_nab_windows(flags, windows)


def _cmd_score(args) -> int:
    _, _, score = _score_from_files(args.report, args.labels, args.length)
    print(
        f"anomalies={score.num_anomalies} positives={score.num_positives} "
        f"tp={score.true_positives} fp={score.false_positives} fn={score.false_negatives}"
    )
    return EXIT_OK


def _cmd_report(args) -> int:
    if args.labels:
        records, windows, score = _score_from_files(args.report, args.labels, args.length)
    else:
        records = read_report_csv(args.report)
        windows, score = [], None
    out = emit_report(records, score, args.format, args.out)
    print(f"wrote {out}")
    if not args.no_plot:
        plot_path = args.plot or str(Path(args.out).with_suffix(".png"))
        print(f"wrote {render_detection_figure(records, windows, plot_path)}")
    return EXIT_OK


_COMMANDS = {
    "synth": _cmd_synth,
    "train": _cmd_train,
    "detect": _cmd_detect,
    "score": _cmd_score,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except DataError as exc:
        print(f"qgad: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"qgad: i/o error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"qgad: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
