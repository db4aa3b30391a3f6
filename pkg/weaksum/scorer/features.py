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

"""Sentence features for the linear scorer.

Only signals available at inference time are used as features: the rule,
word similarity, topic-sentence and sentence-sentence signals.  Signals
that need a reference or a QA answer shape the training targets only.
Each feature signal has a presence flag so that a missing signal (encoded
as 0) is distinguishable from a present 0.
"""
from typing import Tuple

import numpy as np

from weaksum.corpus import Document, TopicInstance, tokenize
from weaksum.signals import SignalMatrix

from .errors import ScorerError

FEATURE_SIGNALS = ("rule", "word_sim", "topic_sent", "sent_sent")

FEATURE_NAMES: Tuple[str, ...] = (
    "position",
    "length",
    *FEATURE_SIGNALS,
    "topic_overlap",
    "bias",
    *(f"has_{name}" for name in FEATURE_SIGNALS),
)

BIAS_INDEX = FEATURE_NAMES.index("bias")

LENGTH_SCALE = 30.0


def featurize(
    document: Document, topic: TopicInstance, matrix: SignalMatrix
) -> np.ndarray:
    """Compute one feature row per sentence.

    :param document: Document to featurize.
    :param topic: Topic of the instance.
    :param matrix: Signals of the same instance.

    :returns: Array of shape (sentences, len(FEATURE_NAMES)).

    :raises ScorerError: If matrix does not cover document.
    """
    n = len(document)
    if matrix.n != n or matrix.doc_id != document.id:
        raise ScorerError(
            brief=f"Signals of {matrix.doc_id!r} do not cover document {document.id!r}."
        )

    topic_tokens = set(tokenize(topic.topic_text))
    features = np.zeros((n, len(FEATURE_NAMES)), dtype=np.float64)

    for sentence in document.sentences:
        row = features[sentence.index]
        tokens = sentence.tokens
        row[0] = sentence.index / n
        row[1] = min(len(tokens) / LENGTH_SCALE, 1.0)

        for offset, name in enumerate(FEATURE_SIGNALS):
            if name in matrix.values:
                row[2 + offset] = matrix.values[name][sentence.index]
                row[BIAS_INDEX + 1 + offset] = 1.0

        row[6] = sum(1 for token in tokens if token in topic_tokens) / len(tokens)
        row[BIAS_INDEX] = 1.0

    return features
