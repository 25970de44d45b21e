"""Trainable evidence models.

Two families are provided. The discriminative family maps an epoch straight
to label probabilities: per-channel z-scoring, flattening, and logistic
regression trained on weighted cross-entropy. The generative family instead
models class-conditional densities: z-score, flatten, PCA to a small number
of components, a linear scorer (logistic regression or LDA) that compresses
each epoch to one real number, and a Gaussian KDE per class over those
scores.

Both families are wrapped behind the EvidenceModel interface, which turns a
TrialEpoch into the LikelihoodPair consumed by the core update rules.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .core import (
    DegenerateEvidenceError,
    LabelPrior,
    LikelihoodMode,
    LikelihoodPair,
)
from .dsp import TrialEpoch, ZScoreStats, apply_zscore, fit_zscore, zscore_array

# Gradient descent defaults for logistic regression.
LEARNING_RATE = 0.1
MAX_ITERATIONS = 10000
GRADIENT_TOLERANCE = 1e-6

# KDE log-densities are clamped here so downstream log-domain updates stay
# finite; exp(-745) is still a positive subnormal double.
LOG_DENSITY_FLOOR = -745.0

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _as_float_matrix(features: np.ndarray) -> np.ndarray:
    out = np.asarray(features, dtype=np.float64)
    if out.ndim != 2:
        raise ValueError(f"expected a 2-D feature matrix, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError("features must be finite")
    return out


def _as_labels(labels: np.ndarray, n: int, require_both: bool = True) -> np.ndarray:
    out = np.asarray(labels)
    if out.shape != (n,):
        raise ValueError(f"expected {n} labels, got shape {out.shape}")
    if not np.all(np.isin(out, (0, 1))):
        raise ValueError("labels must be 0 or 1")
    out = out.astype(np.int64)
    if require_both and out.min() == out.max():
        raise ValueError("both classes must be present")
    return out


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


# ---------------------------------------------------------------------------
# Logistic regression


@dataclass(frozen=True)
class LogisticModel:
    """Linear log-odds model: score(x) = weights . x + bias."""

    weights: np.ndarray
    bias: float

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1:
            raise ValueError("weights must be a vector")
        if not (np.all(np.isfinite(w)) and math.isfinite(self.bias)):
            raise ValueError("logistic parameters must be finite")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def dimension(self) -> int:
        return self.weights.shape[0]


def _sample_weights(
    labels: np.ndarray, class_weights: Optional[tuple[float, float]]
) -> np.ndarray:
    if class_weights is None:
        n = labels.shape[0]
        counts = np.bincount(labels, minlength=2)
        # inverse label fractions: weight_c = n / n_c
        class_weights = (n / counts[0], n / counts[1])
    w_neg, w_pos = class_weights
    if w_neg <= 0 or w_pos <= 0:
        raise ValueError("class weights must be positive")
    return np.where(labels == 1, w_pos, w_neg).astype(np.float64)


def logistic_loss_and_gradient(
    weights: np.ndarray,
    bias: float,
    features: np.ndarray,
    labels: np.ndarray,
    class_weights: Optional[tuple[float, float]] = None,
) -> tuple[float, np.ndarray, float]:
    """Mean weighted cross-entropy and its gradient in (weights, bias).

    Per sample: w_i * (softplus(z_i) - y_i * z_i) with z = X.weights + bias,
    which is the numerically stable form of -w_i * log p(y_i | x_i).
    """
    x = _as_float_matrix(features)
    y = _as_labels(labels, x.shape[0], require_both=class_weights is None)
    sample_w = _sample_weights(y, class_weights)
    z = x @ np.asarray(weights, dtype=np.float64) + bias
    # softplus(z) = log(1 + e^z), computed without overflow
    softplus = np.logaddexp(0.0, z)
    n = x.shape[0]
    loss = float(np.sum(sample_w * (softplus - y * z)) / n)
    residual = sample_w * (_sigmoid(z) - y) / n
    grad_w = x.T @ residual
    grad_b = float(np.sum(residual))
    return loss, grad_w, grad_b


def train_logistic(
    features: np.ndarray,
    labels: np.ndarray,
    class_weights: Optional[tuple[float, float]] = None,
    *,
    learning_rate: float = LEARNING_RATE,
    max_iterations: int = MAX_ITERATIONS,
    tolerance: float = GRADIENT_TOLERANCE,
    loss_trace: Optional[list] = None,
) -> LogisticModel:
    """Fit logistic regression by full-batch gradient descent.

    Starts from zero parameters and stops when the gradient norm drops to
    ``tolerance`` or after ``max_iterations`` steps, whichever comes first.
    Class weights default to inverse label fractions. Deterministic: no
    randomness is involved. If ``loss_trace`` is a list, the loss at each
    iteration is appended to it.
    """
    x = _as_float_matrix(features)
    y = _as_labels(labels, x.shape[0])
    w = np.zeros(x.shape[1])
    b = 0.0
    for _ in range(max_iterations):
        loss, grad_w, grad_b = logistic_loss_and_gradient(w, b, x, y, class_weights)
        if loss_trace is not None:
            loss_trace.append(loss)
        if math.hypot(float(np.linalg.norm(grad_w)), grad_b) <= tolerance:
            break
        w = w - learning_rate * grad_w
        b = b - learning_rate * grad_b
    return LogisticModel(weights=w, bias=b)


def logistic_scores(model: LogisticModel, features: np.ndarray) -> np.ndarray:
    x = _as_float_matrix(features)
    if x.shape[1] != model.dimension:
        raise ValueError(
            f"feature dimension {x.shape[1]} does not match model {model.dimension}"
        )
    return x @ model.weights + model.bias


def predict_proba(model: LogisticModel, feature: np.ndarray) -> LikelihoodPair:
    """p(label | feature) as a discriminative LikelihoodPair."""
    z = logistic_scores(model, np.asarray(feature, dtype=np.float64)[None, :])[0]
    pos = float(_sigmoid(np.asarray([z]))[0])
    return LikelihoodPair.discriminative(pos)


# ---------------------------------------------------------------------------
# Linear discriminant analysis


@dataclass(frozen=True)
class LdaModel:
    """Two-class Gaussian classifier with a shared, ridge-regularized
    covariance, stored as its precision (inverse covariance)."""

    mean_pos: np.ndarray
    mean_neg: np.ndarray
    precision: np.ndarray
    log_prior_pos: float
    log_prior_neg: float

    def __post_init__(self) -> None:
        mp = np.asarray(self.mean_pos, dtype=np.float64)
        mn = np.asarray(self.mean_neg, dtype=np.float64)
        pr = np.asarray(self.precision, dtype=np.float64)
        d = mp.shape[0]
        if mp.shape != (d,) or mn.shape != (d,) or pr.shape != (d, d):
            raise ValueError("inconsistent LDA shapes")
        if not (np.all(np.isfinite(mp)) and np.all(np.isfinite(mn)) and np.all(np.isfinite(pr))):
            raise ValueError("LDA parameters must be finite")
        if not np.allclose(pr, pr.T, atol=1e-10):
            raise ValueError("precision must be symmetric")
        for arr, name in ((mp, "mean_pos"), (mn, "mean_neg"), (pr, "precision")):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def dimension(self) -> int:
        return self.mean_pos.shape[0]


def train_lda(
    features: np.ndarray,
    labels: np.ndarray,
    shrinkage: Optional[float] = None,
) -> LdaModel:
    """Fit LDA with pooled covariance plus a ridge term.

    The ridge defaults to 1e-3 times the mean diagonal of the pooled
    covariance, enough to keep the matrix positive definite on degenerate
    data.
    """
    x = _as_float_matrix(features)
    y = _as_labels(labels, x.shape[0])
    n, d = x.shape
    means = {}
    scatter = np.zeros((d, d))
    for cls in (0, 1):
        rows = x[y == cls]
        means[cls] = rows.mean(axis=0)
        centered = rows - means[cls]
        scatter += centered.T @ centered
    pooled = scatter / max(n - 2, 1)
    if not np.all(np.isfinite(pooled)):
        raise ValueError("pooled covariance is not finite")
    mean_diag = float(np.mean(np.diag(pooled)))
    if shrinkage is None:
        shrinkage = 1e-3 * mean_diag if mean_diag > 0 else 1e-3
    regularized = pooled + shrinkage * np.eye(d)
    try:
        chol = np.linalg.cholesky(regularized)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            "regularized covariance is not positive definite"
        ) from exc
    inv_chol = np.linalg.inv(chol)
    precision = inv_chol.T @ inv_chol
    precision = (precision + precision.T) / 2.0
    counts = np.bincount(y, minlength=2)
    return LdaModel(
        mean_pos=means[1],
        mean_neg=means[0],
        precision=precision,
        log_prior_pos=math.log(counts[1] / n),
        log_prior_neg=math.log(counts[0] / n),
    )


def lda_scores(model: LdaModel, features: np.ndarray) -> np.ndarray:
    """Class-posterior log-ratios log p(+|x) - log p(-|x) for each row."""
    x = _as_float_matrix(features)
    if x.shape[1] != model.dimension:
        raise ValueError(
            f"feature dimension {x.shape[1]} does not match model {model.dimension}"
        )
    dp = x - model.mean_pos
    dn = x - model.mean_neg
    quad_pos = np.einsum("ij,jk,ik->i", dp, model.precision, dp)
    quad_neg = np.einsum("ij,jk,ik->i", dn, model.precision, dn)
    return 0.5 * (quad_neg - quad_pos) + (model.log_prior_pos - model.log_prior_neg)


def lda_score(model: LdaModel, feature: np.ndarray) -> float:
    return float(lda_scores(model, np.asarray(feature, dtype=np.float64)[None, :])[0])


# ---------------------------------------------------------------------------
# PCA

ORTHONORMALITY_ATOL = 1e-8


@dataclass(frozen=True)
class PcaProjection:
    """Affine projection onto the top principal components.

    ``variance_fraction`` records the cumulative explained variance actually
    retained by the kept components.
    """

    mean: np.ndarray
    components: np.ndarray  # (d, r), orthonormal columns
    variance_fraction: float

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=np.float64)
        comp = np.asarray(self.components, dtype=np.float64)
        if mean.ndim != 1 or comp.ndim != 2 or comp.shape[0] != mean.shape[0]:
            raise ValueError("inconsistent PCA shapes")
        gram = comp.T @ comp
        if np.max(np.abs(gram - np.eye(comp.shape[1]))) > ORTHONORMALITY_ATOL:
            raise ValueError("components must be orthonormal")
        for arr, name in ((mean, "mean"), (comp, "components")):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n_components(self) -> int:
        return self.components.shape[1]


def fit_pca(features: np.ndarray, variance_fraction: float = 0.8) -> PcaProjection:
    """Keep the smallest number of components whose cumulative explained
    variance reaches ``variance_fraction``. Zero-variance input keeps one
    component by convention. Component signs are fixed so the entry of
    largest magnitude is positive, making the fit deterministic."""
    x = _as_float_matrix(features)
    n = x.shape[0]
    if n < 2:
        raise ValueError("PCA needs at least 2 samples")
    if not (0.0 < variance_fraction <= 1.0):
        raise ValueError("variance_fraction must lie in (0, 1]")
    mean = x.mean(axis=0)
    centered = x - mean
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    explained = singular**2 / (n - 1)
    total = float(explained.sum())
    if total <= 0.0:
        r = 1
        achieved = 1.0
    else:
        cumulative = np.cumsum(explained) / total
        r = int(np.searchsorted(cumulative, variance_fraction - 1e-12) + 1)
        r = min(r, len(cumulative))
        achieved = float(cumulative[r - 1])
    components = vt[:r].T.copy()
    for j in range(components.shape[1]):
        col = components[:, j]
        if col[np.argmax(np.abs(col))] < 0:
            components[:, j] = -col
    return PcaProjection(mean=mean, components=components, variance_fraction=achieved)


def project(projection: PcaProjection, feature: np.ndarray) -> np.ndarray:
    """Map one feature vector (or a matrix of rows) into component space."""
    x = np.asarray(feature, dtype=np.float64)
    if x.shape[-1] != projection.mean.shape[0]:
        raise ValueError(
            f"feature dimension {x.shape[-1]} does not match PCA "
            f"{projection.mean.shape[0]}"
        )
    return (x - projection.mean) @ projection.components


# ---------------------------------------------------------------------------
# Kernel density estimation


@dataclass(frozen=True)
class KdeDensity:
    """Mean of Gaussian kernels centered on the training scores."""

    scores: np.ndarray
    bandwidth: float = 1.0

    def __post_init__(self) -> None:
        s = np.asarray(self.scores, dtype=np.float64)
        if s.ndim != 1 or s.shape[0] == 0:
            raise ValueError("scores must be a nonempty vector")
        if not np.all(np.isfinite(s)):
            raise ValueError("scores must be finite")
        if not (self.bandwidth > 0 and math.isfinite(self.bandwidth)):
            raise ValueError("bandwidth must be positive and finite")
        s = s.copy()
        s.flags.writeable = False
        object.__setattr__(self, "scores", s)


def fit_kde(scores: np.ndarray, bandwidth: float = 1.0) -> KdeDensity:
    return KdeDensity(scores=np.asarray(scores, dtype=np.float64), bandwidth=bandwidth)


def kde_log_eval_many(density: KdeDensity, xs: np.ndarray) -> np.ndarray:
    """Log-density at each query point, floored at LOG_DENSITY_FLOOR."""
    pts = np.asarray(xs, dtype=np.float64)
    if pts.ndim != 1:
        raise ValueError("query points must be a vector")
    z = (pts[:, None] - density.scores[None, :]) / density.bandwidth
    exponents = -0.5 * z**2
    peak = exponents.max(axis=1)
    logs = peak + np.log(np.exp(exponents - peak[:, None]).mean(axis=1))
    logs -= math.log(density.bandwidth) + LOG_SQRT_2PI
    return np.maximum(logs, LOG_DENSITY_FLOOR)


def kde_log_eval(density: KdeDensity, x: float) -> float:
    return float(kde_log_eval_many(density, np.asarray([x]))[0])


def kde_eval(density: KdeDensity, x: float) -> float:
    """Density at x; never exactly zero thanks to the log floor."""
    return math.exp(kde_log_eval(density, x))


# ---------------------------------------------------------------------------
# Generative pipeline

Scorer = Union[LogisticModel, LdaModel]


def log_ratio_scores(scorer: Scorer, features: np.ndarray) -> np.ndarray:
    """One real score per row: the scorer's estimated class log-ratio."""
    if isinstance(scorer, LogisticModel):
        return logistic_scores(scorer, features)
    return lda_scores(scorer, features)


@dataclass(frozen=True)
class GenerativePipeline:
    """z-score -> flatten -> PCA -> linear scorer -> per-class KDE."""

    zscore: ZScoreStats
    pca: PcaProjection
    scorer: Scorer
    kde_pos: KdeDensity
    kde_neg: KdeDensity

    def __post_init__(self) -> None:
        if self.pca.mean.shape[0] % self.zscore.mean.shape[0] != 0:
            raise ValueError("PCA input dimension must be channels * samples")
        if self.scorer.dimension != self.pca.n_components:
            raise ValueError("scorer dimension must match PCA output")

    @property
    def n_channels(self) -> int:
        return self.zscore.mean.shape[0]


def _flatten_epochs(pipeline: GenerativePipeline, stacked: np.ndarray) -> np.ndarray:
    z = zscore_array(pipeline.zscore, stacked)
    flat = z.reshape(z.shape[0], -1)
    if flat.shape[1] != pipeline.pca.mean.shape[0]:
        raise ValueError(
            f"epoch size {flat.shape[1]} does not match pipeline "
            f"{pipeline.pca.mean.shape[0]}"
        )
    return flat


def pipeline_scores(pipeline: GenerativePipeline, stacked: np.ndarray) -> np.ndarray:
    """Compress a stack of epochs (n, channels, samples) to scalar scores."""
    flat = _flatten_epochs(pipeline, stacked)
    return log_ratio_scores(pipeline.scorer, project(pipeline.pca, flat))


def build_generative(
    train_epochs: Sequence[TrialEpoch],
    *,
    variance_fraction: float = 0.8,
    bandwidth: float = 1.0,
    scorer_kind: str = "logistic",
) -> GenerativePipeline:
    """Train every stage of the generative pipeline on labeled epochs.

    The scorer is fit without class weighting; the class imbalance is instead
    handled downstream by the label prior during Bayes conversion.
    """
    if not train_epochs:
        raise ValueError("no training epochs")
    labels = np.asarray([e.label for e in train_epochs], dtype=np.int64)
    if labels.min() == labels.max():
        raise ValueError("both classes must be present")
    stats = fit_zscore(train_epochs)
    stacked = np.stack([e.data for e in train_epochs])
    flat = zscore_array(stats, stacked).reshape(len(train_epochs), -1)
    pca = fit_pca(flat, variance_fraction)
    reduced = project(pca, flat)
    if scorer_kind == "logistic":
        scorer: Scorer = train_logistic(reduced, labels, class_weights=(1.0, 1.0))
    elif scorer_kind == "lda":
        scorer = train_lda(reduced, labels)
    else:
        raise ValueError(f"unknown scorer kind {scorer_kind!r}")
    scores = log_ratio_scores(scorer, reduced)
    return GenerativePipeline(
        zscore=stats,
        pca=pca,
        scorer=scorer,
        kde_pos=fit_kde(scores[labels == 1], bandwidth),
        kde_neg=fit_kde(scores[labels == 0], bandwidth),
    )


def generative_likelihoods(
    pipeline: GenerativePipeline, epoch: TrialEpoch
) -> LikelihoodPair:
    """Class-conditional densities (d+, d-) for one epoch."""
    score = float(pipeline_scores(pipeline, epoch.data[None, :, :])[0])
    d_pos = math.exp(kde_log_eval(pipeline.kde_pos, score))
    d_neg = math.exp(kde_log_eval(pipeline.kde_neg, score))
    return LikelihoodPair.generative(d_pos, d_neg)


def uniform_prior() -> LabelPrior:
    """50/50 prior for Bayes conversion of generative outputs."""
    return LabelPrior(0.5)


def empirical_prior(labels: Sequence[int]) -> LabelPrior:
    """Prior from training label fractions."""
    arr = np.asarray(labels)
    if arr.size == 0:
        raise ValueError("no labels")
    return LabelPrior(float(arr.mean()))


def generative_to_discriminative(
    pair: LikelihoodPair, prior: LabelPrior
) -> LikelihoodPair:
    """Bayes conversion: pos = d+ p(+) / (d+ p(+) + d- p(-))."""
    if pair.mode is not LikelihoodMode.GENERATIVE:
        raise ValueError("expected a generative pair")
    num = pair.pos * prior.p_pos
    den = num + pair.neg * prior.p_neg
    if den <= 0.0:
        raise DegenerateEvidenceError("both class densities are zero")
    return LikelihoodPair.discriminative(num / den)


# ---------------------------------------------------------------------------
# Evidence model interface


class EvidenceModel(abc.ABC):
    """Anything that turns a TrialEpoch into per-trial evidence.

    Implementations must be deterministic: the same epoch always yields the
    same LikelihoodPair. ``parameter_count`` is the number of stored floats,
    used by reports to relate performance to model size.
    """

    kind: str = "abstract"

    @property
    @abc.abstractmethod
    def mode(self) -> LikelihoodMode: ...

    @abc.abstractmethod
    def predict(self, epoch: TrialEpoch) -> LikelihoodPair: ...

    def predict_batch(self, epochs: Sequence[TrialEpoch]) -> list[LikelihoodPair]:
        return [self.predict(e) for e in epochs]

    @property
    @abc.abstractmethod
    def parameter_count(self) -> int: ...


class LogisticEvidenceModel(EvidenceModel):
    """z-score + logistic regression, the discriminative baseline."""

    kind = "logreg"

    def __init__(self, stats: ZScoreStats, model: LogisticModel):
        self.stats = stats
        self.model = model

    @property
    def mode(self) -> LikelihoodMode:
        return LikelihoodMode.DISCRIMINATIVE

    def predict(self, epoch: TrialEpoch) -> LikelihoodPair:
        flat = apply_zscore(self.stats, epoch).data.reshape(-1)
        return predict_proba(self.model, flat)

    def predict_batch(self, epochs: Sequence[TrialEpoch]) -> list[LikelihoodPair]:
        stacked = np.stack([e.data for e in epochs])
        flat = zscore_array(self.stats, stacked).reshape(len(epochs), -1)
        pos = _sigmoid(logistic_scores(self.model, flat))
        return [LikelihoodPair.discriminative(float(p)) for p in pos]

    @property
    def parameter_count(self) -> int:
        return 2 * self.stats.mean.shape[0] + self.model.dimension + 1


def train_logistic_evidence(
    train_epochs: Sequence[TrialEpoch],
    *,
    learning_rate: float = LEARNING_RATE,
    max_iterations: int = MAX_ITERATIONS,
    tolerance: float = GRADIENT_TOLERANCE,
    loss_trace: Optional[list] = None,
) -> LogisticEvidenceModel:
    """Fit the discriminative baseline on labeled epochs."""
    if not train_epochs:
        raise ValueError("no training epochs")
    labels = np.asarray([e.label for e in train_epochs], dtype=np.int64)
    stats = fit_zscore(train_epochs)
    stacked = np.stack([e.data for e in train_epochs])
    flat = zscore_array(stats, stacked).reshape(len(train_epochs), -1)
    model = train_logistic(
        flat,
        labels,
        learning_rate=learning_rate,
        max_iterations=max_iterations,
        tolerance=tolerance,
        loss_trace=loss_trace,
    )
    return LogisticEvidenceModel(stats, model)


class GenerativeEvidenceModel(EvidenceModel):
    """Wraps a GenerativePipeline; emits class-conditional densities."""

    def __init__(self, pipeline: GenerativePipeline, kind: str = "gen-logr"):
        self.pipeline = pipeline
        self.kind = kind

    @property
    def mode(self) -> LikelihoodMode:
        return LikelihoodMode.GENERATIVE

    def predict(self, epoch: TrialEpoch) -> LikelihoodPair:
        return generative_likelihoods(self.pipeline, epoch)

    def predict_batch(self, epochs: Sequence[TrialEpoch]) -> list[LikelihoodPair]:
        stacked = np.stack([e.data for e in epochs])
        scores = pipeline_scores(self.pipeline, stacked)
        log_pos = kde_log_eval_many(self.pipeline.kde_pos, scores)
        log_neg = kde_log_eval_many(self.pipeline.kde_neg, scores)
        return [
            LikelihoodPair.generative(math.exp(lp), math.exp(ln))
            for lp, ln in zip(log_pos, log_neg)
        ]

    @property
    def parameter_count(self) -> int:
        p = self.pipeline
        zscore = 2 * p.zscore.mean.shape[0]
        pca = p.pca.mean.shape[0] * (1 + p.pca.n_components)
        if isinstance(p.scorer, LogisticModel):
            scorer = p.scorer.dimension + 1
        else:
            scorer = 2 * p.scorer.dimension + p.scorer.dimension**2 + 2
        kde = p.kde_pos.scores.shape[0] + p.kde_neg.scores.shape[0] + 2
        return zscore + pca + scorer + kde


class ConstantEvidenceModel(EvidenceModel):
    """Ignores the epoch and always returns the same pair. Used for the
    control rows: a model that blindly backs one class no matter what."""

    def __init__(
        self,
        pos: float,
        neg: Optional[float] = None,
        mode: LikelihoodMode = LikelihoodMode.DISCRIMINATIVE,
        kind: str = "constant",
    ):
        if mode is LikelihoodMode.DISCRIMINATIVE:
            self._pair = LikelihoodPair.discriminative(pos)
        else:
            if neg is None:
                raise ValueError("generative constant needs both densities")
            self._pair = LikelihoodPair.generative(pos, neg)
        self.kind = kind

    @property
    def mode(self) -> LikelihoodMode:
        return self._pair.mode

    def predict(self, epoch: TrialEpoch) -> LikelihoodPair:
        return self._pair

    @property
    def parameter_count(self) -> int:
        return 0


class OracleEvidenceModel(EvidenceModel):
    """Reads the true epoch label and reports it with certainty."""

    kind = "oracle"

    @property
    def mode(self) -> LikelihoodMode:
        return LikelihoodMode.DISCRIMINATIVE

    def predict(self, epoch: TrialEpoch) -> LikelihoodPair:
        return LikelihoodPair.discriminative(1.0 if epoch.label == 1 else 0.0)

    @property
    def parameter_count(self) -> int:
        return 0
