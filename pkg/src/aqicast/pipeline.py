"""End-to-end orchestration: ingest, denoise, select, train, predict, evaluate.

Every stage reads its inputs from the shared output directory and writes its
own artifacts there, so the ``pipeline`` command is exactly the composition of
the individual stage commands. All stage outputs are deterministic functions
of the configuration (which must carry an explicit seed); wall-clock timing is
only written to ``timing.json`` when explicitly requested, keeping the report
byte-reproducible.

Rows are labeled with the bucket of the AQI computed ``horizon`` steps ahead,
so the classifier is trained to forecast, not to restate the current reading.
The train/test split is chronological per city by default to avoid leakage.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .aqi import AqiConfig, BucketLabel, bucket_of_score, compute_aqi, normalize_aqi
from .errors import AqicastError, InsufficientDataError, StageError
from .evaluate import (
    CSV_COLUMNS,
    EvalReport,
    build_report,
    forecast_time,
    measure_per_sample_ms,
)
from .feature_select import FeatureRanking, SelectConfig, rank_features
from .ingest import (
    ImputePolicy,
    SeriesFrame,
    SinusoidSpec,
    generate_synthetic,
    impute,
    parse_csv_report,
    read_frame_csv,
    write_frame_csv,
)
from .preprocess import preprocess_frame
from .svm import SvmHyper, load_model, model_to_json, predict_batch, train_svm
from .wavelet import DenoiseConfig

logger = logging.getLogger("aqicast")

RANKING_FORMAT = "aqicast-ranking"
RANKING_VERSION = 1

DEFAULT_CURVE_SIZES = tuple(range(2000, 20001, 2000))

STAGE_ORDER = ("synth", "ingest", "preprocess", "select", "train", "predict", "evaluate")

ARTIFACTS = {
    "raw": "raw.csv",
    "ingested": "ingested.csv",
    "preprocessed": "preprocessed.csv",
    "ranking": "ranking.json",
    "model": "model.json",
    "test_features": "test-features.csv",
    "test_truth": "test-truth.csv",
    "predictions": "predictions.csv",
    "report_json": "report.json",
    "report_csv": "report.csv",
    "curves": "curves.csv",
    "resolved_config": "resolved-config.json",
    "timing": "timing.json",
}


@dataclass(frozen=True)
class SyntheticSpec:
    """What to generate when no input CSV is given."""

    n_rows: int
    seed: int
    city: str = "Synthetic"
    params: dict[str, SinusoidSpec] | None = None


@dataclass(frozen=True)
class SplitSpec:
    """Train/test partition: chronological prefix or seeded shuffle."""

    fraction: float = 0.8
    mode: str = "chronological"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.fraction < 1.0:
            raise ValueError(f"split fraction must be in (0, 1), got {self.fraction}")
        if self.mode not in ("chronological", "random"):
            raise ValueError(f"split mode must be chronological or random, got {self.mode!r}")


def split_counts(n: int, fraction: float) -> tuple[int, int]:
    """floor(n * fraction) training rows, the remainder held out."""
    train = math.floor(n * fraction)
    return train, n - train


@dataclass(frozen=True)
class PipelineConfig:
    """Fully resolved run configuration; every field has a concrete value."""

    seed: int
    input_path: str | None
    synthetic: SyntheticSpec | None
    cities: tuple[str, ...] | None
    impute: ImputePolicy
    denoise: DenoiseConfig
    select: SelectConfig
    aqi: AqiConfig
    svm: SvmHyper
    split: SplitSpec
    horizon: int = 1
    per_sample_ms: float = 0.0
    measure_timing: bool = False
    curve_sizes: tuple[int, ...] = DEFAULT_CURVE_SIZES
    out_dir: str = "out"

    def __post_init__(self):
        if (self.input_path is None) == (self.synthetic is None):
            raise ValueError("config needs exactly one of input_path or synthetic")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.per_sample_ms < 0:
            raise ValueError(f"per_sample_ms must be >= 0, got {self.per_sample_ms}")

    @classmethod
    def from_dict(cls, raw: dict) -> "PipelineConfig":
        if "seed" not in raw:
            raise ValueError("config must set an explicit top-level seed")
        seed = int(raw["seed"])
        synthetic = None
        if raw.get("synthetic") is not None:
            s = raw["synthetic"]
            params = None
            if s.get("params"):
                params = {name: SinusoidSpec(**spec) for name, spec in s["params"].items()}
            synthetic = SyntheticSpec(
                n_rows=int(s["n_rows"]),
                seed=int(s.get("seed", seed)),
                city=s.get("city", "Synthetic"),
                params=params,
            )
        imp = raw.get("impute", {})
        den = raw.get("denoise", {})
        sel = raw.get("select", {})
        aqi_raw = raw.get("aqi", {})
        svm_raw = raw.get("svm", {})
        split_raw = raw.get("split", {})
        return cls(
            seed=seed,
            input_path=raw.get("input_path"),
            synthetic=synthetic,
            cities=tuple(raw["cities"]) if raw.get("cities") else None,
            impute=ImputePolicy(mode=imp.get("mode", "forward_fill"),
                                max_gap=int(imp.get("max_gap", 24))),
            denoise=DenoiseConfig(filter=den.get("filter", "haar"),
                                  levels=int(den.get("levels", 3)),
                                  threshold_rule=den.get("threshold_rule", "universal_soft")),
            select=SelectConfig(
                k=int(sel.get("k", 7)),
                learning_rate=float(sel.get("learning_rate", 0.01)),
                max_iters=int(sel.get("max_iters", 10000)),
                tol=float(sel.get("tol", 1e-8)),
                redundancy_cutoff=float(sel.get("redundancy_cutoff", 0.95)),
                weight_regression=float(sel.get("weight_regression", 0.5)),
            ),
            aqi=AqiConfig(normalizer=float(aqi_raw.get("normalizer", 400.0)),
                          bounds=tuple(aqi_raw.get("bounds", (0.0, 0.25, 0.5, 0.75, 1.0)))),
            svm=SvmHyper(seed=int(svm_raw.get("seed", seed)),
                         regularization=float(svm_raw.get("regularization", 1e-3)),
                         epochs=int(svm_raw.get("epochs", 200)),
                         learning_rate=float(svm_raw.get("learning_rate", 0.01))),
            split=SplitSpec(fraction=float(split_raw.get("fraction", 0.8)),
                            mode=split_raw.get("mode", "chronological"),
                            seed=int(split_raw.get("seed", seed))),
            horizon=int(raw.get("horizon", 1)),
            per_sample_ms=float(raw.get("per_sample_ms", 0.0)),
            measure_timing=bool(raw.get("measure_timing", False)),
            curve_sizes=tuple(int(n) for n in raw.get("curve_sizes", DEFAULT_CURVE_SIZES)),
            out_dir=raw.get("out_dir", "out"),
        )

    @classmethod
    def from_json_file(cls, path) -> "PipelineConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        synthetic = None
        if self.synthetic is not None:
            synthetic = {
                "n_rows": self.synthetic.n_rows,
                "seed": self.synthetic.seed,
                "city": self.synthetic.city,
                "params": None if self.synthetic.params is None else {
                    name: {"offset": s.offset, "amplitude": s.amplitude,
                           "period": s.period, "sigma": s.sigma}
                    for name, s in sorted(self.synthetic.params.items())
                },
            }
        return {
            "seed": self.seed,
            "input_path": self.input_path,
            "synthetic": synthetic,
            "cities": list(self.cities) if self.cities else None,
            "impute": {"mode": self.impute.mode, "max_gap": self.impute.max_gap},
            "denoise": {"filter": self.denoise.filter, "levels": self.denoise.levels,
                        "threshold_rule": self.denoise.threshold_rule},
            "select": {"k": self.select.k, "learning_rate": self.select.learning_rate,
                       "max_iters": self.select.max_iters, "tol": self.select.tol,
                       "redundancy_cutoff": self.select.redundancy_cutoff,
                       "weight_regression": self.select.weight_regression},
            "aqi": {"normalizer": self.aqi.normalizer, "bounds": list(self.aqi.bounds)},
            "svm": {"seed": self.svm.seed, "regularization": self.svm.regularization,
                    "epochs": self.svm.epochs, "learning_rate": self.svm.learning_rate},
            "split": {"fraction": self.split.fraction, "mode": self.split.mode,
                      "seed": self.split.seed},
            "horizon": self.horizon,
            "per_sample_ms": self.per_sample_ms,
            "measure_timing": self.measure_timing,
            "curve_sizes": list(self.curve_sizes),
            "out_dir": self.out_dir,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature rows at time t paired with bucket labels at t + horizon."""

    feature_names: tuple[str, ...]
    X_train: np.ndarray
    aqi_train: np.ndarray
    labels_train: list[BucketLabel]
    X_test: np.ndarray
    labels_test: list[BucketLabel]
    test_row_ids: list[str]


def build_dataset(frames: Sequence[SeriesFrame], config: PipelineConfig) -> Dataset:
    """Align features with future bucket labels and split train/test per city."""
    X_train, aqi_train, labels_train = [], [], []
    X_test, labels_test, row_ids = [], [], []
    rng = np.random.default_rng(config.split.seed)
    names: tuple[str, ...] | None = None
    for frame in frames:
        if names is None:
            names = frame.columns
        usable = frame.n_rows - config.horizon
        if usable < 2:
            raise InsufficientDataError(
                f"frame for {frame.city!r} has {frame.n_rows} rows; "
                f"need more than horizon + 1 = {config.horizon + 1}")
        # denoised series may undershoot zero; the AQI formula needs >= 0
        clamped = np.maximum(frame.data, 0.0)
        aqi_values = np.array([
            compute_aqi(dict(zip(frame.columns, row))) for row in clamped
        ])
        future_aqi = aqi_values[config.horizon:]
        labels = [bucket_of_score(normalize_aqi(a, config.aqi), config.aqi)
                  for a in future_aqi]
        n_train, n_test = split_counts(usable, config.split.fraction)
        if n_train < 1 or n_test < 1:
            raise InsufficientDataError(
                f"split {config.split.fraction} leaves an empty side for "
                f"{frame.city!r} ({usable} usable rows)")
        if config.split.mode == "random":
            order = rng.permutation(usable)
        else:
            order = np.arange(usable)
        train_idx = np.sort(order[:n_train])
        test_idx = np.sort(order[n_train:])
        X_train.append(frame.data[train_idx])
        aqi_train.append(future_aqi[train_idx])
        labels_train.extend(labels[i] for i in train_idx)
        X_test.append(frame.data[test_idx])
        labels_test.extend(labels[i] for i in test_idx)
        row_ids.extend(
            f"{frame.city}|{frame.timestamps[i].strftime('%Y-%m-%d %H:%M:%S')}"
            for i in test_idx)
    return Dataset(
        feature_names=names or (),
        X_train=np.vstack(X_train),
        aqi_train=np.concatenate(aqi_train),
        labels_train=labels_train,
        X_test=np.vstack(X_test),
        labels_test=labels_test,
        test_row_ids=row_ids,
    )


class _Emitter:
    """Writes artifacts and remembers what it created for failure cleanup."""

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.created: list[Path] = []

    def path(self, key: str) -> Path:
        return self.out_dir / ARTIFACTS[key]

    def write_text(self, key: str, text: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        target = self.path(key)
        target.write_text(text, encoding="utf-8")
        self.created.append(target)
        return target

    def cleanup(self) -> None:
        for target in self.created:
            try:
                target.unlink()
            except OSError:
                pass


def _write_resolved_config(config: PipelineConfig, emitter: _Emitter) -> None:
    emitter.write_text("resolved_config", config.to_json())


def stage_synth(config: PipelineConfig, emitter: _Emitter) -> None:
    if config.synthetic is None:
        raise ValueError("config has no synthetic section")
    frame = generate_synthetic(config.synthetic.seed, config.synthetic.n_rows,
                               config.synthetic.params, config.synthetic.city)
    buf = []
    write_frame_csv([frame], _ListWriter(buf))
    emitter.write_text("raw", "".join(buf))
    logger.info("synth: wrote %d rows for %s", frame.n_rows, frame.city)


class _ListWriter:
    def __init__(self, sink: list[str]):
        self.sink = sink

    def write(self, text: str) -> None:
        self.sink.append(text)


def _frames_to_csv_text(frames: Sequence[SeriesFrame]) -> str:
    buf: list[str] = []
    write_frame_csv(frames, _ListWriter(buf))
    return "".join(buf)


def stage_ingest(config: PipelineConfig, emitter: _Emitter) -> None:
    if config.input_path is not None:
        source = Path(config.input_path).read_bytes()
    else:
        source = emitter.path("raw").read_bytes()
    report = parse_csv_report(source)
    frames = report.frames
    if config.cities:
        wanted = set(config.cities)
        frames = [f for f in frames if f.city in wanted]
        missing = wanted - {f.city for f in frames}
        if missing:
            raise InsufficientDataError(f"cities not in input: {sorted(missing)}")
    if not frames:
        raise InsufficientDataError("no city frames parsed from input")
    frames = [impute(f, config.impute) for f in frames]
    emitter.write_text("ingested", _frames_to_csv_text(frames))
    logger.info("ingest: %d frame(s), %d repaired cells, %d rejected rows",
                len(frames), report.unparseable_cells, report.rejected_rows)


def stage_preprocess(config: PipelineConfig, emitter: _Emitter) -> None:
    with open(emitter.path("ingested"), newline="", encoding="utf-8") as handle:
        frames = read_frame_csv(handle)
    processed = [preprocess_frame(frame, config.denoise) for frame in frames]
    emitter.write_text("preprocessed", _frames_to_csv_text(processed))
    logger.info("preprocess: denoised %d frame(s)", len(processed))


def _load_preprocessed(emitter: _Emitter) -> list[SeriesFrame]:
    with open(emitter.path("preprocessed"), newline="", encoding="utf-8") as handle:
        return read_frame_csv(handle)


def stage_select(config: PipelineConfig, emitter: _Emitter) -> FeatureRanking:
    dataset = build_dataset(_load_preprocessed(emitter), config)
    ranking = rank_features(dataset.X_train, dataset.aqi_train,
                            dataset.feature_names, config.select)
    payload = {
        "format": RANKING_FORMAT,
        "version": RANKING_VERSION,
        "target": f"aqi+{config.horizon}",
        "ranked": [[name, score] for name, score in ranking.ranked],
        "selected": list(ranking.selected),
    }
    emitter.write_text("ranking", json.dumps(payload, sort_keys=True, indent=2) + "\n")
    logger.info("select: kept %s", ", ".join(ranking.selected))
    return ranking


def _load_ranking(emitter: _Emitter) -> list[str]:
    payload = json.loads(emitter.path("ranking").read_text(encoding="utf-8"))
    if payload.get("format") != RANKING_FORMAT:
        raise ValueError(f"not an {RANKING_FORMAT} document")
    return list(payload["selected"])


def stage_train(config: PipelineConfig, emitter: _Emitter) -> None:
    frames = _load_preprocessed(emitter)
    dataset = build_dataset(frames, config)
    selected = _load_ranking(emitter)
    take = [dataset.feature_names.index(name) for name in selected]
    model = train_svm(dataset.X_train[:, take], dataset.labels_train, config.svm,
                      feature_names=selected, normalizer=config.aqi.normalizer)
    emitter.write_text("model", model_to_json(model))

    feature_rows = ["row_id," + ",".join(selected)]
    for row_id, row in zip(dataset.test_row_ids, dataset.X_test[:, take]):
        feature_rows.append(row_id + "," + ",".join(repr(float(v)) for v in row))
    emitter.write_text("test_features", "\n".join(feature_rows) + "\n")

    truth_rows = ["row_id,bucket"]
    truth_rows.extend(f"{row_id},{label.display}"
                      for row_id, label in zip(dataset.test_row_ids, dataset.labels_test))
    emitter.write_text("test_truth", "\n".join(truth_rows) + "\n")
    logger.info("train: %d train rows, %d held-out rows",
                len(dataset.labels_train), len(dataset.labels_test))


def read_feature_csv(path) -> tuple[list[str], list[str], np.ndarray]:
    """Read a row_id + feature-columns CSV; returns (ids, names, matrix)."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header and header[0] == "row_id":
            names = header[1:]
            ids, rows = [], []
            for row in reader:
                ids.append(row[0])
                rows.append([float(v) for v in row[1:]])
        else:
            names = header
            ids, rows = [], []
            for k, row in enumerate(reader):
                ids.append(str(k))
                rows.append([float(v) for v in row])
    return ids, names, np.array(rows, dtype=float).reshape(len(rows), len(names))


def predictions_csv(ids: Sequence[str], labels: Sequence[BucketLabel],
                    scores: np.ndarray) -> str:
    header = "row_id,bucket," + ",".join(f"score_{c.display}" for c in BucketLabel)
    lines = [header]
    for row_id, label, row in zip(ids, labels, scores):
        lines.append(f"{row_id},{label.display}," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def stage_predict(config: PipelineConfig, emitter: _Emitter) -> None:
    model = load_model(emitter.path("model"))
    ids, names, X = read_feature_csv(emitter.path("test_features"))
    if tuple(names) != model.feature_names:
        raise ValueError(
            f"feature columns {names} do not match model {list(model.feature_names)}")
    labels, scores = predict_batch(model, X)
    emitter.write_text("predictions", predictions_csv(ids, labels, scores))
    if config.measure_timing:
        measured = measure_per_sample_ms(model, X)
        emitter.write_text("timing", json.dumps(
            {"measured_per_sample_ms": measured}, sort_keys=True, indent=2) + "\n")
    logger.info("predict: %d rows", len(ids))


def read_label_csv(path, column: str = "bucket") -> tuple[list[str], list[BucketLabel]]:
    """Read row ids and bucket labels from a CSV with a header."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        idx = header.index(column)
        id_idx = header.index("row_id") if "row_id" in header else None
        ids, labels = [], []
        for k, row in enumerate(reader):
            ids.append(row[id_idx] if id_idx is not None else str(k))
            labels.append(BucketLabel.from_display(row[idx]))
    return ids, labels


def stage_evaluate(config: PipelineConfig, emitter: _Emitter) -> EvalReport:
    _, predicted = read_label_csv(emitter.path("predictions"))
    _, truth = read_label_csv(emitter.path("test_truth"))
    report = build_report(predicted, truth, per_sample_ms=config.per_sample_ms)
    emitter.write_text("report_json", report.to_json())
    emitter.write_text("report_csv",
                       ",".join(CSV_COLUMNS) + "\n" + report.csv_row() + "\n")

    lines = ["n,accuracy_pct,error_pct,time_ms"]
    n_test = len(predicted)
    for size in config.curve_sizes:
        cycled_pred = [predicted[i % n_test] for i in range(size)]
        cycled_truth = [truth[i % n_test] for i in range(size)]
        sized = build_report(cycled_pred, cycled_truth)
        lines.append(f"{size},{sized.accuracy_pct!r},{sized.error_pct!r},"
                     f"{forecast_time(size, config.per_sample_ms)!r}")
    emitter.write_text("curves", "\n".join(lines) + "\n")
    logger.info("evaluate: accuracy %.2f%% over %d rows",
                report.accuracy_pct, report.n_samples)
    return report


_STAGE_FUNCS: dict[str, Callable[[PipelineConfig, _Emitter], object]] = {
    "synth": stage_synth,
    "ingest": stage_ingest,
    "preprocess": stage_preprocess,
    "select": stage_select,
    "train": stage_train,
    "predict": stage_predict,
    "evaluate": stage_evaluate,
}


def run_stage(name: str, config: PipelineConfig, out_dir) -> object:
    """Run one named stage against the artifacts in ``out_dir``."""
    emitter = _Emitter(Path(out_dir))
    _write_resolved_config(config, emitter)
    try:
        return _STAGE_FUNCS[name](config, emitter)
    except AqicastError as exc:
        raise StageError(name, exc) from exc


def run_pipeline(config: PipelineConfig, out_dir) -> EvalReport:
    """Run every stage in order; on failure remove this run's artifacts."""
    emitter = _Emitter(Path(out_dir))
    stage = "config"
    try:
        _write_resolved_config(config, emitter)
        for stage in STAGE_ORDER:
            if stage == "synth" and config.synthetic is None:
                continue
            result = _STAGE_FUNCS[stage](config, emitter)
        return result  # the evaluate stage's report
    except Exception as exc:
        emitter.cleanup()
        if isinstance(exc, StageError):
            raise
        raise StageError(stage, exc) from exc
