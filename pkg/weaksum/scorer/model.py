# Copyright 2021 Canonical Ltd.
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License version 3 as
# published by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.

"""Logistic sentence scorer trained on soft targets.

The objective is the mean soft-target cross-entropy between the predicted
probability p and the fused target, plus an L2 penalty on every weight but
the bias.  Training is mini-batch gradient descent from zero weights over a
shuffle order fixed by the seed, so identical inputs give identical weights.
"""
import dataclasses
import json
import logging
import math
import pathlib
from typing import List, Sequence, Tuple

import numpy as np

from weaksum import jsonl

from .errors import ScorerError, TrainingError
from .features import BIAS_INDEX, FEATURE_NAMES

logger = logging.getLogger(__name__)

MODEL_VERSION = 1


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    """Optimizer settings."""

    learning_rate: float = 0.1
    epochs: int = 20
    l2: float = 1e-4
    seed: int = 0
    clamp_eps: float = 1e-7
    batch_size: int = 32

    def __post_init__(self) -> None:
        if not self.learning_rate > 0:
            raise ScorerError(brief="learning_rate must be > 0.")
        if self.epochs < 0:
            raise ScorerError(brief="epochs must be >= 0.")
        if not self.l2 >= 0:
            raise ScorerError(brief="l2 must be >= 0.")
        if not 0 < self.clamp_eps < 0.5:
            raise ScorerError(brief="clamp_eps must be in (0, 0.5).")
        if self.batch_size < 1:
            raise ScorerError(brief="batch_size must be >= 1.")


@dataclasses.dataclass(frozen=True, eq=False)
class LinearScorer:
    """Weights of a logistic model over sentence features."""

    weights: np.ndarray
    feature_names: Tuple[str, ...] = FEATURE_NAMES
    bias_index: int = BIAS_INDEX

    def __post_init__(self) -> None:
        if self.weights.shape != (len(self.feature_names),):
            raise ScorerError(
                brief=f"Expected {len(self.feature_names)} weights, "
                f"got shape {self.weights.shape}."
            )
        if not np.all(np.isfinite(self.weights)):
            raise ScorerError(brief="Scorer weights must be finite.")

    @classmethod
    def zeros(cls, feature_names: Tuple[str, ...] = FEATURE_NAMES) -> "LinearScorer":
        """A scorer predicting 0.5 for everything."""
        return cls(
            weights=np.zeros(len(feature_names), dtype=np.float64),
            feature_names=feature_names,
            bias_index=feature_names.index("bias"),
        )

    def weight(self, name: str) -> float:
        """Weight of the named feature."""
        return float(self.weights[self.feature_names.index(name)])


@dataclasses.dataclass
class TrainingReport:
    """Per-epoch training loss."""

    epoch_losses: List[float] = dataclasses.field(default_factory=list)

    @property
    def final_loss(self) -> float:
        """Loss after the last epoch (NaN when no epoch ran)."""
        return self.epoch_losses[-1] if self.epoch_losses else math.nan


def sigmoid(logits: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    return np.exp(-np.logaddexp(0.0, -np.asarray(logits, dtype=np.float64)))


def predict(scorer: LinearScorer, features: np.ndarray) -> np.ndarray:
    """Probability of each feature row being a summary sentence."""
    return sigmoid(np.asarray(features, dtype=np.float64) @ scorer.weights)


def _check_targets(targets: np.ndarray) -> None:
    if targets.size and not (np.all(targets >= 0.0) and np.all(targets <= 1.0)):
        raise TrainingError(brief="Targets must lie in [0, 1].")


def cross_entropy(
    probabilities: np.ndarray, targets: np.ndarray, *, clamp_eps: float = 1e-7
) -> np.ndarray:
    """Soft-target cross-entropy per element, with p clamped away from 0 and 1.

    :raises TrainingError: If a target lies outside [0, 1].
    """
    targets = np.asarray(targets, dtype=np.float64)
    _check_targets(targets)
    p = np.clip(np.asarray(probabilities, dtype=np.float64), clamp_eps, 1.0 - clamp_eps)
    return -(targets * np.log(p) + (1.0 - targets) * np.log(1.0 - p))


def _penalized(scorer: LinearScorer) -> np.ndarray:
    weights = scorer.weights.copy()
    weights[scorer.bias_index] = 0.0
    return weights


def loss(
    scorer: LinearScorer,
    features: np.ndarray,
    targets: np.ndarray,
    config: TrainConfig = TrainConfig(),
) -> float:
    """Mean cross-entropy over the batch plus l2/2 times the squared weights.

    The bias is excluded from the penalty.

    :raises TrainingError: If a target lies outside [0, 1].
    """
    entropy = cross_entropy(
        predict(scorer, features), targets, clamp_eps=config.clamp_eps
    )
    penalized = _penalized(scorer)
    mean = float(np.mean(entropy)) if entropy.size else 0.0
    return mean + 0.5 * config.l2 * float(penalized @ penalized)


def gradient(
    scorer: LinearScorer,
    features: np.ndarray,
    targets: np.ndarray,
    config: TrainConfig = TrainConfig(),
) -> np.ndarray:
    """Analytic gradient of :func:`loss` with respect to the weights."""
    features = np.asarray(features, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    _check_targets(targets)
    residual = predict(scorer, features) - targets
    grad = features.T @ residual / max(len(targets), 1)
    return grad + config.l2 * _penalized(scorer)


def stack_examples(
    examples: Sequence[Tuple[np.ndarray, Sequence[float]]]
) -> Tuple[np.ndarray, np.ndarray]:
    """Stack per-instance (features, targets) pairs into two arrays.

    :raises TrainingError: On empty input or mismatched lengths.
    """
    if not examples:
        raise TrainingError(brief="Cannot train on zero instances.")

    for features, targets in examples:
        if len(features) != len(targets):
            raise TrainingError(
                brief=f"Got {len(features)} feature rows for {len(targets)} targets."
            )

    features = np.vstack([np.asarray(item[0], dtype=np.float64) for item in examples])
    targets = np.concatenate(
        [np.asarray(item[1], dtype=np.float64) for item in examples]
    )
    return features, targets


def train(
    examples: Sequence[Tuple[np.ndarray, Sequence[float]]],
    config: TrainConfig = TrainConfig(),
    *,
    feature_names: Tuple[str, ...] = FEATURE_NAMES,
) -> Tuple[LinearScorer, TrainingReport]:
    """Fit a scorer by mini-batch gradient descent.

    :param examples: One (features, fused targets) pair per instance.
    :param config: Optimizer settings.
    :param feature_names: Names of the feature columns.

    :returns: Final scorer and the per-epoch losses.

    :raises TrainingError: On empty input, invalid targets or a NaN loss.
    """
    features, targets = stack_examples(examples)
    _check_targets(targets)

    scorer = LinearScorer.zeros(feature_names)
    weights = scorer.weights.copy()
    rng = np.random.default_rng(config.seed)
    report = TrainingReport()

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(targets))
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            step = gradient(
                dataclasses.replace(scorer, weights=weights),
                features[batch],
                targets[batch],
                config,
            )
            weights = weights - config.learning_rate * step

        if not np.all(np.isfinite(weights)):
            raise TrainingError(
                brief=f"Training diverged at epoch {epoch}.",
                resolution="Lower the learning rate.",
            )

        scorer = dataclasses.replace(scorer, weights=weights)
        epoch_loss = loss(scorer, features, targets, config)
        if math.isnan(epoch_loss):
            raise TrainingError(
                brief=f"Loss is NaN at epoch {epoch}.",
                resolution="Lower the learning rate.",
            )

        report.epoch_losses.append(epoch_loss)
        logger.info("Epoch %d/%d loss %.6f", epoch, config.epochs, epoch_loss)

    return scorer, report


def save_model(path: pathlib.Path, scorer: LinearScorer) -> None:
    """Write the model file atomically."""
    jsonl.write_text_atomic(
        path,
        jsonl.dumps(
            {
                "version": MODEL_VERSION,
                "feature_names": list(scorer.feature_names),
                "weights": [float(value) for value in scorer.weights],
            }
        )
        + "\n",
    )


def load_model(path: pathlib.Path) -> LinearScorer:
    """Read a model file written by :func:`save_model`.

    :raises ScorerError: If the file is unreadable or of another version.
    """
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        version = data["version"]
        names = tuple(str(name) for name in data["feature_names"])
        weights = np.array([float(value) for value in data["weights"]])
    except (OSError, ValueError, KeyError, TypeError) as error:
        raise ScorerError(
            brief=f"Failed to load model {str(path)!r}.", details=str(error)
        ) from error

    if version != MODEL_VERSION:
        raise ScorerError(
            brief=f"Unsupported model version {version!r} in {str(path)!r}.",
            resolution="Re-run the train stage.",
        )

    if names != FEATURE_NAMES:
        raise ScorerError(
            brief=f"Model {str(path)!r} was trained on other features.",
            resolution="Re-run the train stage.",
        )

    return LinearScorer(weights=weights, feature_names=names)
