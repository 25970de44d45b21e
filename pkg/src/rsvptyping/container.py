"""Self-describing binary container for datasets, raw recordings and models.

Layout: a 4-byte little-endian header length, a UTF-8 JSON header, then the
payload bytes. The header's "kind" field says what the payload holds:

* "epochs": float32 epochs in epoch-major, channel-major, time-minor order,
  followed by one label byte per epoch;
* "raw": one continuous float32 block (channel-major, time-minor) with the
  stimulus onset table carried in the header;
* "model": float64 arrays back to back, listed with names and shapes in the
  header, so trained models round-trip bit for bit.

Headers are serialized with sorted keys and no whitespace, which makes every
writer output byte-identical for identical inputs.
"""

from __future__ import annotations

import json
import struct
from typing import Sequence

import numpy as np

from .dsp import RawRecording, TrialEpoch
from .models import (
    EvidenceModel,
    GenerativeEvidenceModel,
    GenerativePipeline,
    KdeDensity,
    LdaModel,
    LogisticEvidenceModel,
    LogisticModel,
    PcaProjection,
)
from .dsp import ZScoreStats
from .synth import LabeledDataset

FORMAT_NAME = "rsvptyping-container"
FORMAT_VERSION = 1
KINDS = ("epochs", "raw", "model")


class ContainerFormatError(ValueError):
    """The file is not a readable container of the expected kind."""


def _encode_header(header: dict) -> bytes:
    return json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")


def write_container(path, header: dict, payload: bytes) -> None:
    body = _encode_header(header)
    with open(path, "wb") as fh:
        fh.write(struct.pack("<I", len(body)))
        fh.write(body)
        fh.write(payload)


def read_container(path, expected_kind: str) -> tuple[dict, bytes]:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise ContainerFormatError(f"cannot read {path}: {exc}") from exc
    if len(blob) < 4:
        raise ContainerFormatError(f"{path}: too short for a container")
    (header_len,) = struct.unpack("<I", blob[:4])
    if len(blob) < 4 + header_len:
        raise ContainerFormatError(f"{path}: truncated header")
    try:
        header = json.loads(blob[4 : 4 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ContainerFormatError(f"{path}: malformed header") from exc
    if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
        raise ContainerFormatError(f"{path}: not a {FORMAT_NAME} file")
    if header.get("version") != FORMAT_VERSION:
        raise ContainerFormatError(
            f"{path}: unsupported version {header.get('version')!r}"
        )
    kind = header.get("kind")
    if kind != expected_kind:
        raise ContainerFormatError(
            f"{path}: expected kind {expected_kind!r}, found {kind!r}"
        )
    return header, blob[4 + header_len :]


def _base_header(kind: str) -> dict:
    return {"format": FORMAT_NAME, "version": FORMAT_VERSION, "kind": kind}


# ---------------------------------------------------------------------------
# Epoch datasets


def write_dataset(path, epochs: Sequence[TrialEpoch], rate: float | None = None) -> None:
    if not epochs:
        raise ValueError("refusing to write an empty dataset")
    stacked = np.stack([e.data for e in epochs]).astype("<f4")
    labels = np.asarray([e.label for e in epochs], dtype=np.uint8)
    n, channels, samples = stacked.shape
    header = _base_header("epochs")
    header.update(
        {
            "n_epochs": n,
            "channels": channels,
            "samples_per_epoch": samples,
            "rate": rate,
            "label_offset": n * channels * samples * 4,
        }
    )
    write_container(path, header, stacked.tobytes() + labels.tobytes())


def read_dataset(path) -> LabeledDataset:
    header, payload = read_container(path, "epochs")
    try:
        n = int(header["n_epochs"])
        channels = int(header["channels"])
        samples = int(header["samples_per_epoch"])
        offset = int(header["label_offset"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ContainerFormatError(f"{path}: incomplete dataset header") from exc
    expected = n * channels * samples * 4
    if offset != expected or len(payload) != expected + n:
        raise ContainerFormatError(f"{path}: payload size does not match header")
    data = (
        np.frombuffer(payload[:offset], dtype="<f4")
        .reshape(n, channels, samples)
        .astype(np.float64)
    )
    labels = np.frombuffer(payload[offset:], dtype=np.uint8)
    if not np.all(np.isin(labels, (0, 1))):
        raise ContainerFormatError(f"{path}: labels must be 0 or 1")
    try:
        epochs = tuple(
            TrialEpoch(data[i], int(labels[i]), i * samples) for i in range(n)
        )
        return LabeledDataset(epochs=epochs)
    except ValueError as exc:
        raise ContainerFormatError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Raw recordings


def write_raw(path, recording: RawRecording) -> None:
    data = recording.data.astype("<f4")
    header = _base_header("raw")
    header.update(
        {
            "channels": recording.n_channels,
            "n_samples": recording.n_samples,
            "rate": recording.rate,
            "onsets": [[int(s), int(l)] for s, l in recording.stim_onsets],
        }
    )
    write_container(path, header, data.tobytes())


def read_raw(path) -> RawRecording:
    header, payload = read_container(path, "raw")
    try:
        channels = int(header["channels"])
        n_samples = int(header["n_samples"])
        rate = float(header["rate"])
        onsets = tuple((int(s), int(l)) for s, l in header["onsets"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ContainerFormatError(f"{path}: incomplete raw header") from exc
    if len(payload) != channels * n_samples * 4:
        raise ContainerFormatError(f"{path}: payload size does not match header")
    data = (
        np.frombuffer(payload, dtype="<f4")
        .reshape(channels, n_samples)
        .astype(np.float64)
    )
    try:
        return RawRecording(data=data, rate=rate, stim_onsets=onsets)
    except ValueError as exc:
        raise ContainerFormatError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Models


def _model_arrays(model: EvidenceModel) -> tuple[str, list[tuple[str, np.ndarray]]]:
    if isinstance(model, LogisticEvidenceModel):
        return model.kind, [
            ("zscore_mean", model.stats.mean),
            ("zscore_std", model.stats.std),
            ("weights", model.model.weights),
            ("bias", np.asarray(model.model.bias)),
        ]
    if isinstance(model, GenerativeEvidenceModel):
        p = model.pipeline
        arrays = [
            ("zscore_mean", p.zscore.mean),
            ("zscore_std", p.zscore.std),
            ("pca_mean", p.pca.mean),
            ("pca_components", p.pca.components),
            ("pca_variance_fraction", np.asarray(p.pca.variance_fraction)),
        ]
        if isinstance(p.scorer, LogisticModel):
            arrays += [
                ("scorer_weights", p.scorer.weights),
                ("scorer_bias", np.asarray(p.scorer.bias)),
            ]
        else:
            arrays += [
                ("lda_mean_pos", p.scorer.mean_pos),
                ("lda_mean_neg", p.scorer.mean_neg),
                ("lda_precision", p.scorer.precision),
                (
                    "lda_log_priors",
                    np.asarray([p.scorer.log_prior_pos, p.scorer.log_prior_neg]),
                ),
            ]
        arrays += [
            ("kde_pos_scores", p.kde_pos.scores),
            ("kde_neg_scores", p.kde_neg.scores),
            (
                "kde_bandwidths",
                np.asarray([p.kde_pos.bandwidth, p.kde_neg.bandwidth]),
            ),
        ]
        return model.kind, arrays
    raise ValueError(f"model kind {model.kind!r} cannot be serialized")


def write_model(path, model: EvidenceModel, hyper: dict | None = None) -> None:
    """Serialize a trained model; float64 payload gives bit-exact loading."""
    kind, arrays = _model_arrays(model)
    header = _base_header("model")
    header["model"] = kind
    header["arrays"] = [
        {"name": name, "shape": list(arr.shape)} for name, arr in arrays
    ]
    header["hyper"] = hyper or {}
    payload = b"".join(
        np.ascontiguousarray(arr, dtype="<f8").tobytes() for _, arr in arrays
    )
    write_container(path, header, payload)


def _read_arrays(path, header: dict, payload: bytes) -> dict[str, np.ndarray]:
    out = {}
    offset = 0
    for entry in header.get("arrays", []):
        shape = tuple(int(s) for s in entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        nbytes = count * 8
        if offset + nbytes > len(payload):
            raise ContainerFormatError(f"{path}: model payload truncated")
        arr = np.frombuffer(payload[offset : offset + nbytes], dtype="<f8")
        out[entry["name"]] = arr.reshape(shape).astype(np.float64)
        offset += nbytes
    if offset != len(payload):
        raise ContainerFormatError(f"{path}: model payload has trailing bytes")
    return out


def read_model(path) -> tuple[EvidenceModel, dict]:
    """Load a trained model plus the hyperparameters it was trained with."""
    header, payload = read_container(path, "model")
    kind = header.get("model")
    arrays = _read_arrays(path, header, payload)
    hyper = header.get("hyper", {})
    try:
        stats = ZScoreStats(mean=arrays["zscore_mean"], std=arrays["zscore_std"])
        if kind == "logreg":
            model = LogisticModel(
                weights=arrays["weights"], bias=float(arrays["bias"])
            )
            return LogisticEvidenceModel(stats, model), hyper
        if kind in ("gen-logr", "gen-lda"):
            pca = PcaProjection(
                mean=arrays["pca_mean"],
                components=arrays["pca_components"],
                variance_fraction=float(arrays["pca_variance_fraction"]),
            )
            if kind == "gen-logr":
                scorer = LogisticModel(
                    weights=arrays["scorer_weights"],
                    bias=float(arrays["scorer_bias"]),
                )
            else:
                scorer = LdaModel(
                    mean_pos=arrays["lda_mean_pos"],
                    mean_neg=arrays["lda_mean_neg"],
                    precision=arrays["lda_precision"],
                    log_prior_pos=float(arrays["lda_log_priors"][0]),
                    log_prior_neg=float(arrays["lda_log_priors"][1]),
                )
            bandwidths = arrays["kde_bandwidths"]
            pipeline = GenerativePipeline(
                zscore=stats,
                pca=pca,
                scorer=scorer,
                kde_pos=KdeDensity(arrays["kde_pos_scores"], float(bandwidths[0])),
                kde_neg=KdeDensity(arrays["kde_neg_scores"], float(bandwidths[1])),
            )
            return GenerativeEvidenceModel(pipeline, kind=kind), hyper
    except KeyError as exc:
        raise ContainerFormatError(f"{path}: missing model array {exc}") from exc
    raise ContainerFormatError(f"{path}: unknown model kind {kind!r}")
