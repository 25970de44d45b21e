"""Recursive Bayesian posterior updates over a typing alphabet.

A typing session maintains a probability distribution over the symbols of a
fixed alphabet. Each query presents one symbol and yields one piece of binary
evidence (target / non-target). Two update rules are supported:

* discriminative: evidence arrives as label probabilities p(label | response),
  and the queried symbol's mass is scaled by ``pos / p_pos`` while every other
  symbol is scaled by ``neg / p_neg``;
* generative: evidence arrives as class-conditional densities
  p(response | label), and the queried symbol is scaled by the positive
  density, all others by the negative density.

All accumulation happens in the log domain so that long query sequences do
not underflow, and every public operation returns a freshly normalized state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

# Tolerance for the "probabilities sum to one" invariant after public ops.
PROB_ATOL = 1e-12

# Discriminative pairs must be a proper two-class distribution this tightly.
DISC_SUM_ATOL = 1e-9


class DegenerateEvidenceError(ArithmeticError):
    """An update wiped out every symbol's probability mass."""


class LikelihoodMode(Enum):
    DISCRIMINATIVE = "discriminative"
    GENERATIVE = "generative"


def _log(x: float) -> float:
    return math.log(x) if x > 0.0 else float("-inf")


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct display symbols."""

    symbols: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.symbols) < 2:
            raise ValueError("alphabet needs at least 2 symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be distinct")

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index_of(self, symbol: str) -> int:
        return self.symbols.index(symbol)

    @classmethod
    def default(cls, size: int = 28) -> "Alphabet":
        """Lowercase letters, then '_' (space) and '<' (backspace), truncated
        or extended with numbered placeholders to reach ``size``."""
        base = [chr(c) for c in range(ord("a"), ord("z") + 1)] + ["_", "<"]
        if size <= len(base):
            return cls(tuple(base[:size]))
        extra = [f"#{i}" for i in range(size - len(base))]
        return cls(tuple(base + extra))


@dataclass(frozen=True)
class LabelPrior:
    """Prior probability that a queried symbol is the target."""

    p_pos: float

    def __post_init__(self) -> None:
        if not (0.0 < self.p_pos < 1.0):
            raise ValueError(f"p_pos must lie in (0, 1), got {self.p_pos}")

    @property
    def p_neg(self) -> float:
        return 1.0 - self.p_pos

    @classmethod
    def uniform_over(cls, alphabet_size: int) -> "LabelPrior":
        """p_pos = 1/A: under a uniform symbol prior, one queried symbol is
        the target with probability 1/A. The reading of "uniform" is
        ambiguous, so this is a default, not a hard rule."""
        return cls(1.0 / alphabet_size)


@dataclass(frozen=True)
class LikelihoodPair:
    """Per-trial evidence in either representation.

    Discriminative mode: ``pos``/``neg`` are p(label=+|e) and p(label=-|e)
    and must sum to one. Generative mode: they are the class-conditional
    densities p(e|label=+) and p(e|label=-), nonnegative and not both zero.
    """

    mode: LikelihoodMode
    pos: float
    neg: float

    def __post_init__(self) -> None:
        if self.pos < 0.0 or self.neg < 0.0:
            raise ValueError("likelihood values must be nonnegative")
        if not (math.isfinite(self.pos) and math.isfinite(self.neg)):
            raise ValueError("likelihood values must be finite")
        if self.pos + self.neg <= 0.0:
            raise ValueError("pos and neg cannot both be zero")
        if self.mode is LikelihoodMode.DISCRIMINATIVE:
            if abs(self.pos + self.neg - 1.0) > DISC_SUM_ATOL:
                raise ValueError(
                    f"discriminative pair must sum to 1, got {self.pos + self.neg}"
                )

    @classmethod
    def discriminative(cls, pos: float) -> "LikelihoodPair":
        return cls(LikelihoodMode.DISCRIMINATIVE, pos, 1.0 - pos)

    @classmethod
    def generative(cls, pos: float, neg: float) -> "LikelihoodPair":
        return cls(LikelihoodMode.GENERATIVE, pos, neg)


@dataclass(frozen=True)
class QueryEvent:
    """One presented symbol together with the evidence it produced."""

    queried_index: int
    likelihood: LikelihoodPair


@dataclass(frozen=True)
class PosteriorState:
    """Normalized log-probability vector over the alphabet.

    States are values: update operations return new instances and never
    mutate, so states can be shared freely across threads or sessions.
    ``step`` counts how many evidence events have been applied.
    """

    log_probs: np.ndarray
    step: int = 0

    def __post_init__(self) -> None:
        lp = np.asarray(self.log_probs, dtype=np.float64)
        lp.flags.writeable = False
        object.__setattr__(self, "log_probs", lp)

    @property
    def size(self) -> int:
        return self.log_probs.shape[0]

    def probabilities(self) -> np.ndarray:
        """Linear-domain probabilities, renormalized against drift."""
        m = np.max(self.log_probs)
        w = np.exp(self.log_probs - m)
        return w / np.sum(w)


def _normalized(log_mass: np.ndarray, step: int) -> PosteriorState:
    if not np.any(log_mass > -np.inf):
        raise DegenerateEvidenceError(
            "evidence assigns zero mass to every symbol with remaining prior mass"
        )
    m = np.max(log_mass)
    log_z = m + math.log(np.sum(np.exp(log_mass - m)))
    return PosteriorState(log_mass - log_z, step)


def init_posterior(
    alphabet: Alphabet, prior: Optional[Sequence[float]] = None
) -> PosteriorState:
    """Starting distribution: uniform by default, else the normalized prior.

    Zero entries are allowed in a custom prior (they stay impossible), but
    the prior must have positive total mass and one entry per symbol.
    """
    a = alphabet.size
    if prior is None:
        return PosteriorState(np.full(a, -math.log(a)), step=0)
    p = np.asarray(prior, dtype=np.float64)
    if p.shape != (a,):
        raise ValueError(f"prior length {p.shape} does not match alphabet size {a}")
    if np.any(p < 0.0) or not np.all(np.isfinite(p)):
        raise ValueError("prior entries must be finite and nonnegative")
    total = float(np.sum(p))
    if total <= 0.0:
        raise ValueError("prior must have positive total mass")
    with np.errstate(divide="ignore"):
        log_p = np.log(p) - math.log(total)
    return _normalized(log_p, step=0)


def _updated(
    state: PosteriorState, queried_index: int, log_pos: float, log_neg: float
) -> PosteriorState:
    if not (0 <= queried_index < state.size):
        raise ValueError(f"queried index {queried_index} outside alphabet")
    log_mass = state.log_probs + log_neg
    # log_probs[q] may be -inf; -inf plus a finite factor stays -inf.
    q_mass = state.log_probs[queried_index] + log_pos
    log_mass = log_mass.copy()
    log_mass[queried_index] = q_mass
    return _normalized(log_mass, state.step + 1)


def update_discriminative(
    state: PosteriorState, event: QueryEvent, label_prior: LabelPrior
) -> PosteriorState:
    """One evidence step using label probabilities.

    The queried symbol's unnormalized mass is multiplied by ``pos / p_pos``,
    every other symbol's by ``neg / p_neg``, and the result is renormalized.
    """
    pair = event.likelihood
    if pair.mode is not LikelihoodMode.DISCRIMINATIVE:
        raise ValueError("update_discriminative requires discriminative evidence")
    log_pos = _log(pair.pos) - _log(label_prior.p_pos)
    log_neg = _log(pair.neg) - _log(label_prior.p_neg)
    return _updated(state, event.queried_index, log_pos, log_neg)


def update_generative(state: PosteriorState, event: QueryEvent) -> PosteriorState:
    """One evidence step using class-conditional densities.

    The queried symbol's mass is multiplied by p(e|+), all others by p(e|-);
    any common scale factor cancels in the normalization.
    """
    pair = event.likelihood
    if pair.mode is not LikelihoodMode.GENERATIVE:
        raise ValueError("update_generative requires generative evidence")
    return _updated(state, event.queried_index, _log(pair.pos), _log(pair.neg))


def apply_query(
    state: PosteriorState,
    events: Sequence[QueryEvent],
    label_prior: Optional[LabelPrior] = None,
) -> PosteriorState:
    """Apply a batch of same-mode events sequentially.

    Responses within a query are treated as independent, so the result does
    not depend on event order. An empty batch returns the state unchanged.
    """
    if not events:
        return state
    modes = {e.likelihood.mode for e in events}
    if len(modes) > 1:
        raise ValueError("apply_query requires all events to share one mode")
    mode = modes.pop()
    if mode is LikelihoodMode.DISCRIMINATIVE:
        if label_prior is None:
            raise ValueError("discriminative updates need a label prior")
        for event in events:
            state = update_discriminative(state, event, label_prior)
    else:
        for event in events:
            state = update_generative(state, event)
    return state


def decide(state: PosteriorState, threshold: float) -> Optional[int]:
    """Index of the most probable symbol if it reaches ``threshold``.

    Ties go to the lowest index. Returns None while no symbol is confident
    enough to type.
    """
    if not (0.0 < threshold <= 1.0):
        raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
    probs = state.probabilities()
    best = int(np.argmax(probs))
    return best if probs[best] >= threshold else None
