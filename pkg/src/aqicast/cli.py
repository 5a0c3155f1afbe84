"""Command-line front end.

One subcommand per pipeline stage plus ``pipeline`` to run them all and
``synth`` to materialize a synthetic input. Stage commands read the artifacts
of earlier stages from the output directory, so

    aqicast synth --config cfg.json
    aqicast ingest --config cfg.json
    ...
    aqicast evaluate --config cfg.json

is equivalent to ``aqicast pipeline --config cfg.json``. ``predict`` and
``evaluate`` also run standalone on explicit files. Failures are reported as
one JSON object on stderr with exit code 1; usage errors exit with 2. The
``AQICAST_LOG`` environment variable sets the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .errors import AqicastError, StageError
from .evaluate import build_report
from .pipeline import (
    PipelineConfig,
    predictions_csv,
    read_feature_csv,
    read_label_csv,
    run_pipeline,
    run_stage,
)
from .svm import load_model, predict_batch

_STAGES = ("synth", "ingest", "preprocess", "select", "train", "predict", "evaluate")


def _setup_logging() -> None:
    level = os.environ.get("AQICAST_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_config(args) -> PipelineConfig:
    raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if getattr(args, "seed", None) is not None:
        raw["seed"] = args.seed
        # per-section seeds default to the top-level one, so clear them too
        for section in ("synthetic", "svm", "split"):
            if isinstance(raw.get(section), dict):
                raw[section].pop("seed", None)
    if getattr(args, "split", None) is not None:
        raw.setdefault("split", {})["fraction"] = args.split
    if getattr(args, "policy", None) is not None:
        raw.setdefault("impute", {})["mode"] = args.policy
    if getattr(args, "cities", None):
        raw["cities"] = [c for c in args.cities.split(",") if c]
    if getattr(args, "out", None) is not None:
        raw["out_dir"] = args.out
    return PipelineConfig.from_dict(raw)


def _add_common(parser: argparse.ArgumentParser, config_required: bool = True) -> None:
    parser.add_argument("--config", required=config_required,
                        help="pipeline configuration JSON")
    parser.add_argument("--out", help="output directory (overrides config out_dir)")
    parser.add_argument("--seed", type=int, help="override the configured seed")
    parser.add_argument("--cities", help="comma-separated city filter")
    parser.add_argument("--split", type=float, help="override train fraction")
    parser.add_argument("--policy", choices=("forward_fill", "drop_row", "column_mean"),
                        help="override the imputation policy")


def _cmd_stage(args) -> int:
    config = _load_config(args)
    run_stage(args.stage, config, config.out_dir)
    return 0


def _cmd_pipeline(args) -> int:
    config = _load_config(args)
    report = run_pipeline(config, config.out_dir)
    sys.stdout.write(report.to_json())
    return 0


def _cmd_predict(args) -> int:
    if args.model or args.input:
        if not (args.model and args.input):
            raise ValueError("standalone predict needs both --model and --input")
        model = load_model(args.model)
        ids, names, X = read_feature_csv(args.input)
        if tuple(names) != model.feature_names:
            raise ValueError(f"feature columns {names} do not match model "
                             f"{list(model.feature_names)}")
        labels, scores = predict_batch(model, X)
        text = predictions_csv(ids, labels, scores)
        if args.out_file:
            Path(args.out_file).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return 0
    if not args.config:
        raise ValueError("predict needs either --model/--input or --config")
    return _cmd_stage(args)


def _cmd_evaluate(args) -> int:
    if args.pred or args.truth:
        if not (args.pred and args.truth):
            raise ValueError("standalone evaluate needs both --pred and --truth")
        _, predicted = read_label_csv(args.pred)
        _, truth = read_label_csv(args.truth)
        report = build_report(predicted, truth, per_sample_ms=args.per_sample_ms)
        sys.stdout.write(report.to_json())
        return 0
    if not args.config:
        raise ValueError("evaluate needs either --pred/--truth or --config")
    return _cmd_stage(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aqicast",
        description="Air-quality bucket forecasting: denoise, select, classify, score.")
    sub = parser.add_subparsers(dest="command", required=True)

    for stage in ("synth", "ingest", "preprocess", "select", "train"):
        stage_parser = sub.add_parser(stage, help=f"run the {stage} stage")
        _add_common(stage_parser)
        stage_parser.set_defaults(func=_cmd_stage, stage=stage)

    predict_parser = sub.add_parser(
        "predict", help="predict buckets (stage mode, or standalone with --model/--input)")
    _add_common(predict_parser, config_required=False)
    predict_parser.add_argument("--model", help="model JSON for standalone mode")
    predict_parser.add_argument("--input", help="feature CSV for standalone mode")
    predict_parser.add_argument("--out-file", help="write predictions here instead of stdout")
    predict_parser.set_defaults(func=_cmd_predict, stage="predict")

    evaluate_parser = sub.add_parser(
        "evaluate", help="score predictions (stage mode, or standalone with --pred/--truth)")
    _add_common(evaluate_parser, config_required=False)
    evaluate_parser.add_argument("--pred", help="predictions CSV for standalone mode")
    evaluate_parser.add_argument("--truth", help="truth CSV for standalone mode")
    evaluate_parser.add_argument("--per-sample-ms", type=float, default=0.0,
                                 help="per-prediction cost used for the time total")
    evaluate_parser.set_defaults(func=_cmd_evaluate, stage="evaluate")

    pipeline_parser = sub.add_parser("pipeline", help="run every stage in order")
    _add_common(pipeline_parser)
    pipeline_parser.set_defaults(func=_cmd_pipeline)
    return parser


def _error_payload(exc: BaseException) -> dict:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, StageError):
        payload["stage"] = exc.stage
        payload["error"] = type(exc.cause).__name__
        payload["message"] = str(exc.cause)
    return payload


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AqicastError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        sys.stderr.write(json.dumps(_error_payload(exc), sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
