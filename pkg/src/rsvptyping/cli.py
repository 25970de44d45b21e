"""Command-line interface.

Five subcommands cover the full workflow: ``synth`` writes a synthetic
dataset, ``preprocess`` turns a raw recording into epochs, ``train`` fits an
evidence model, ``simulate`` runs the typing benchmark across splits and
writes a report, and ``report`` merges report files into one CSV table.

Every command is a pure function of its input files, config, and seed:
rerunning with identical inputs produces byte-identical outputs. Exit codes:
0 success, 1 usage or config error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from typing import Optional

import numpy as np

from . import __version__
from .core import Alphabet, DegenerateEvidenceError
from .container import (
    ContainerFormatError,
    read_dataset,
    read_model,
    read_raw,
    write_dataset,
    write_model,
)
from .dsp import (
    design_bandpass,
    design_notch,
    downsample,
    epoch,
    exclude_channels,
    filter_forward,
)
from .models import (
    ConstantEvidenceModel,
    EvidenceModel,
    GenerativeEvidenceModel,
    OracleEvidenceModel,
    build_generative,
    train_logistic_evidence,
)
from .reports import (
    build_report,
    csv_path_for,
    read_report_json,
    report_csv_row,
    write_csv,
    write_report_json,
)
from .sim import (
    QueryStrategy,
    TypingConfig,
    balanced_accuracy,
    classify_epochs,
    evaluate_splits,
)
from .synth import SynthConfig, generate, split

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

MODEL_KINDS = ("logreg", "gen-logr", "gen-lda")
BUILTIN_MODELS = ("oracle", "uninformative", "always-pos", "always-neg")


class ConfigError(Exception):
    """Bad usage or configuration; reported before any computation."""


class DataError(Exception):
    """Input files exist but their contents cannot be used."""


# ---------------------------------------------------------------------------
# Config files: flat key=value lines, # comments, no sections.


def parse_config_file(path) -> dict[str, tuple[str, int]]:
    """Read key=value lines into {key: (raw value, line number)}."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        if key in entries:
            raise ConfigError(
                f"{path}:{lineno}: duplicate key {key!r} (first on line {entries[key][1]})"
            )
        entries[key] = (value, lineno)
    return entries


def _convert(kind: str, raw: str):
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "bool":
        lowered = raw.lower()
        if lowered in ("true", "1", "yes"):
            return True
        if lowered in ("false", "0", "no"):
            return False
        raise ValueError(f"expected true/false, got {raw!r}")
    if kind == "str":
        return raw
    if kind == "int_list":
        if not raw:
            return ()
        return tuple(int(part.strip()) for part in raw.split(","))
    raise AssertionError(f"unknown converter {kind}")


def resolve_config(
    path: Optional[str],
    schema: dict[str, str],
    defaults: dict,
    overrides: Optional[dict] = None,
) -> dict:
    """Merge defaults, config file, and CLI overrides; reject unknown keys."""
    resolved = dict(defaults)
    if path is not None:
        for key, (raw, lineno) in parse_config_file(path).items():
            if key not in schema:
                known = ", ".join(sorted(schema))
                raise ConfigError(
                    f"{path}:{lineno}: unknown key {key!r} (known keys: {known})"
                )
            try:
                resolved[key] = _convert(schema[key], raw)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    for key, value in (overrides or {}).items():
        if value is not None:
            resolved[key] = value
    return resolved


# ---------------------------------------------------------------------------
# Subcommands


def cmd_synth(args) -> int:
    schema = {
        "n_epochs": "int",
        "channels": "int",
        "rate": "float",
        "trial_ms": "float",
        "erp_latency_ms": "float",
        "erp_width_ms": "float",
        "erp_amplitude": "float",
        "noise_std": "float",
        "target_fraction": "float",
        "erp_channels": "int_list",
        "seed": "int",
    }
    defaults = {
        f.name: f.default for f in dataclasses.fields(SynthConfig) if f.name in schema
    }
    resolved = resolve_config(args.config, schema, defaults, {"seed": args.seed})
    if resolved.get("erp_channels") == ():
        resolved["erp_channels"] = None
    try:
        config = SynthConfig(**resolved)
        dataset = generate(config)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    write_dataset(args.out, dataset.epochs, rate=config.rate)
    labels = dataset.labels
    n_pos = int(labels.sum())
    print(f"wrote {args.out}")
    print(
        f"epochs: {config.n_epochs}  channels: {config.channels}  "
        f"samples per epoch: {config.samples_per_epoch}  rate: {config.rate:.1f} Hz"
    )
    print(
        f"positive labels: {n_pos}  negative labels: {config.n_epochs - n_pos}  "
        f"label fraction: {n_pos / config.n_epochs:.6f}"
    )
    return EXIT_OK


TRAIN_SCHEMA = {
    "learning_rate": "float",
    "max_iterations": "int",
    "tolerance": "float",
    "variance_fraction": "float",
    "bandwidth": "float",
    "holdout_fraction": "float",
    "seed": "int",
}

TRAIN_DEFAULTS = {
    "learning_rate": 0.1,
    "max_iterations": 10000,
    "tolerance": 1e-6,
    "variance_fraction": 0.8,
    "bandwidth": 1.0,
    "holdout_fraction": 0.1,
    "seed": 0,
}


def _fit_model(kind: str, train_epochs: list, resolved: dict, loss_trace=None) -> EvidenceModel:
    if kind == "logreg":
        return train_logistic_evidence(
            train_epochs,
            learning_rate=resolved["learning_rate"],
            max_iterations=resolved["max_iterations"],
            tolerance=resolved["tolerance"],
            loss_trace=loss_trace,
        )
    pipeline = build_generative(
        train_epochs,
        variance_fraction=resolved["variance_fraction"],
        bandwidth=resolved["bandwidth"],
        scorer_kind="logistic" if kind == "gen-logr" else "lda",
    )
    return GenerativeEvidenceModel(pipeline, kind=kind)


def _hyper_for(kind: str, resolved: dict) -> dict:
    if kind == "logreg":
        keys = ("learning_rate", "max_iterations", "tolerance")
    else:
        keys = ("variance_fraction", "bandwidth")
    return {k: resolved[k] for k in keys}


def cmd_train(args) -> int:
    resolved = resolve_config(args.config, TRAIN_SCHEMA, TRAIN_DEFAULTS, {"seed": args.seed})
    if not 0.0 < resolved["holdout_fraction"] < 1.0:
        raise ConfigError("holdout_fraction must lie in (0, 1)")
    dataset = read_dataset(args.data)
    try:
        holdout = split(
            dataset,
            n_splits=1,
            test_fraction=resolved["holdout_fraction"],
            seed=resolved["seed"],
        )[0]
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    train_epochs = [dataset.epochs[i] for i in holdout.train]
    valid_epochs = [dataset.epochs[i] for i in holdout.test]
    trace: list = []
    try:
        model = _fit_model(args.kind, train_epochs, resolved, loss_trace=trace)
    except np.linalg.LinAlgError:
        raise
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    predictions = classify_epochs(model, valid_epochs)
    ba = balanced_accuracy(predictions, [e.label for e in valid_epochs])
    write_model(args.out, model, hyper=_hyper_for(args.kind, resolved))
    print(f"wrote {args.out}")
    print(f"model: {args.kind}  parameters: {model.parameter_count}")
    print(f"train epochs: {len(train_epochs)}  validation epochs: {len(valid_epochs)}")
    if trace:
        tail = "  ".join(f"{v:.6f}" for v in trace[-5:])
        print(f"loss tail: {tail}")
    print(f"validation balanced accuracy: {ba:.6f}")
    return EXIT_OK


SIMULATE_SCHEMA = {
    "attempts": "int",
    "max_rounds": "int",
    "symbols_per_query": "int",
    "alphabet_size": "int",
    "threshold": "float",
    "query_strategy": "str",
    "stop_on_wrong": "bool",
    "conversion_prior": "str",
    "splits": "int",
    "split_seed": "int",
    "seed": "int",
}

SIMULATE_DEFAULTS = {
    "attempts": 1000,
    "max_rounds": 10,
    "symbols_per_query": 10,
    "alphabet_size": 28,
    "threshold": 0.9,
    "query_strategy": QueryStrategy.WITH_REPLACEMENT.value,
    "stop_on_wrong": True,
    "conversion_prior": "uniform",
    "splits": 5,
    "split_seed": 0,
    "seed": 0,
}


def _builtin_factory(name: str, alphabet_size: int):
    if name == "oracle":
        return lambda train: OracleEvidenceModel()
    if name == "uninformative":
        return lambda train: ConstantEvidenceModel(1.0 / alphabet_size, kind="uninformative")
    if name == "always-pos":
        return lambda train: ConstantEvidenceModel(0.9, kind="always-pos")
    if name == "always-neg":
        return lambda train: ConstantEvidenceModel(0.1, kind="always-neg")
    raise AssertionError(name)


def _file_model_factory(kind: str, hyper: dict):
    resolved = dict(TRAIN_DEFAULTS)
    resolved.update(hyper)

    def factory(train_epochs):
        try:
            return _fit_model(kind, list(train_epochs), resolved)
        except np.linalg.LinAlgError:
            raise
        except ValueError as exc:
            raise DataError(str(exc)) from exc

    return factory


def cmd_simulate(args) -> int:
    resolved = resolve_config(
        args.config,
        SIMULATE_SCHEMA,
        SIMULATE_DEFAULTS,
        {"seed": args.seed, "splits": args.splits},
    )
    try:
        strategy = QueryStrategy(resolved["query_strategy"])
    except ValueError as exc:
        choices = ", ".join(s.value for s in QueryStrategy)
        raise ConfigError(
            f"query_strategy must be one of: {choices}; got {resolved['query_strategy']!r}"
        ) from exc
    if resolved["conversion_prior"] not in ("uniform", "empirical"):
        raise ConfigError(
            f"conversion_prior must be 'uniform' or 'empirical', got {resolved['conversion_prior']!r}"
        )
    if resolved["splits"] < 1:
        raise ConfigError("splits must be at least 1")
    # repeats within a query are only possible when sampling with replacement
    if (
        strategy is not QueryStrategy.WITH_REPLACEMENT
        and resolved["symbols_per_query"] > resolved["alphabet_size"]
    ):
        raise ConfigError(
            f"symbols_per_query {resolved['symbols_per_query']} exceeds alphabet "
            f"size {resolved['alphabet_size']} for strategy {strategy.value!r}"
        )
    try:
        typing_config = TypingConfig(
            attempts=resolved["attempts"],
            max_rounds=resolved["max_rounds"],
            symbols_per_query=resolved["symbols_per_query"],
            alphabet=Alphabet.default(resolved["alphabet_size"]),
            threshold=resolved["threshold"],
            query_strategy=strategy,
            seed=resolved["seed"],
            stop_on_wrong=resolved["stop_on_wrong"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    dataset = read_dataset(args.data)
    if args.model in BUILTIN_MODELS:
        kind = args.model
        parameter_count = 0
        factory = _builtin_factory(kind, resolved["alphabet_size"])
    else:
        loaded, hyper = read_model(args.model)
        kind = loaded.kind
        parameter_count = loaded.parameter_count
        factory = _file_model_factory(kind, hyper)

    try:
        summary = evaluate_splits(
            factory,
            dataset,
            typing_config,
            n_splits=resolved["splits"],
            split_seed=resolved["split_seed"],
            empirical_conversion=resolved["conversion_prior"] == "empirical",
        )
    except np.linalg.LinAlgError:
        raise
    except ValueError as exc:
        raise DataError(str(exc)) from exc

    config_echo = dict(resolved)
    config_echo["query_strategy"] = strategy.value
    config_echo["model"] = str(args.model)
    config_echo["data"] = str(args.data)
    report = build_report(
        command="simulate",
        seed=resolved["seed"],
        config_echo=config_echo,
        model_kind=kind,
        parameter_count=parameter_count,
        summary=summary,
    )
    write_report_json(args.out, report)
    write_csv(csv_path_for(args.out), [report_csv_row(report)])
    print(f"wrote {args.out}")
    print(f"model: {kind}  splits: {resolved['splits']}  attempts: {resolved['attempts']}")
    print(
        f"balanced accuracy: {summary.mean_balanced_accuracy:.6f} "
        f"± {summary.std_balanced_accuracy:.6f}"
    )
    print(f"itr bits/symbol: {summary.mean_itr:.6f} ± {summary.std_itr:.6f}")
    return EXIT_OK


PREPROCESS_SCHEMA = {
    "notch_hz": "float",
    "notch_q": "float",
    "band_low": "float",
    "band_high": "float",
    "band_order": "int",
    "downsample_factor": "int",
    "window_ms": "float",
    "exclude_channels": "int_list",
}

PREPROCESS_DEFAULTS = {
    "notch_hz": 50.0,
    "notch_q": 30.0,
    "band_low": 1.0,
    "band_high": 20.0,
    "band_order": 2,
    "downsample_factor": 2,
    "window_ms": 500.0,
    "exclude_channels": (),
}


def cmd_preprocess(args) -> int:
    resolved = resolve_config(args.config, PREPROCESS_SCHEMA, PREPROCESS_DEFAULTS)
    recording = read_raw(args.raw)
    try:
        if resolved["exclude_channels"]:
            recording = exclude_channels(recording, resolved["exclude_channels"])
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    try:
        notch = design_notch(recording.rate, resolved["notch_hz"], resolved["notch_q"])
        band = design_bandpass(
            recording.rate,
            resolved["band_low"],
            resolved["band_high"],
            order=resolved["band_order"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    filtered = filter_forward(band, filter_forward(notch, recording.data))
    recording = dataclasses.replace(recording, data=filtered)
    try:
        recording = downsample(recording, resolved["downsample_factor"])
        epochs, dropped = epoch(recording, resolved["window_ms"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not epochs:
        raise DataError("no epochs survive preprocessing")
    write_dataset(args.out, epochs, rate=recording.rate)
    print(f"wrote {args.out}")
    print(
        f"channels: {recording.n_channels}  rate: {recording.rate:.1f} Hz  "
        f"samples per epoch: {epochs[0].data.shape[1]}"
    )
    print(f"epochs: {len(epochs)}  dropped at boundary: {dropped}")
    return EXIT_OK


def cmd_report(args) -> int:
    rows = []
    for path in args.reports:
        try:
            report = read_report_json(path)
            rows.append(report_csv_row(report))
        except OSError as exc:
            raise DataError(f"cannot read report {path}: {exc}") from exc
        except (ValueError, KeyError, TypeError) as exc:
            raise DataError(f"{path}: not a valid report file") from exc
    rows.sort(key=lambda r: (int(r["parameters"]), r["model"]))
    write_csv(args.out, rows)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser and dispatch


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; we reserve 2 for data
    errors, so route usage problems through ConfigError instead."""

    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="rsvptyping",
        description="Bayesian RSVP typing: synthesis, training, simulation.",
    )
    parser.add_argument("--version", action="version", version=f"rsvptyping {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic ERP dataset")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out", required=True, help="output dataset path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="fit an evidence model on a dataset")
    p.add_argument("data", help="input dataset file")
    p.add_argument("--kind", choices=MODEL_KINDS, default="logreg")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out", required=True, help="output model path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("simulate", help="run the typing benchmark across splits")
    p.add_argument(
        "model",
        help=f"model file, or one of: {', '.join(BUILTIN_MODELS)}",
    )
    p.add_argument("data", help="input dataset file")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--splits", type=int, help="override the split count")
    p.add_argument("--out", required=True, help="output report path (.json)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("preprocess", help="raw recording -> epoch dataset")
    p.add_argument("raw", help="input raw recording file")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--out", required=True, help="output dataset path")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("report", help="merge simulation reports into one CSV")
    p.add_argument("reports", nargs="+", help="report JSON files")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ContainerFormatError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DegenerateEvidenceError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
