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

import numpy as np
import pytest

from weaksum.corpus import Document, TopicInstance, TopicOrigin
from weaksum.scorer import FEATURE_NAMES, ScorerError, featurize
from weaksum.signals import SignalMatrix

LONG_SENTENCE = " ".join(f"word{number}" for number in range(40)) + "."


@pytest.fixture()
def document():
    return Document.from_sentences(
        doc_id="d1",
        sentences=[
            "Geneva approved the plan.",
            "It rained all day long in the city today.",
            LONG_SENTENCE,
            "Nothing else happened.",
        ],
    )


@pytest.fixture()
def topic():
    return TopicInstance(
        doc_id="d1",
        topic_text="Geneva plan",
        topic_entities=("Geneva",),
        origin=TopicOrigin.PROVIDED,
    )


@pytest.fixture()
def matrix():
    return SignalMatrix(
        doc_id="d1",
        topic_text="Geneva plan",
        n=4,
        values={
            "rule": (1.0, 0.0, 0.0, 0.0),
            "topic_sent": (0.9, 0.1, 0.2, 0.0),
            "qa": (1.0, 0.0, 0.0, 0.0),
        },
    )


def column(name: str) -> int:
    return FEATURE_NAMES.index(name)


def test_shape_and_bias(document, topic, matrix):
    features = featurize(document, topic, matrix)

    assert features.shape == (4, len(FEATURE_NAMES))
    assert np.all(features[:, column("bias")] == 1.0)
    assert np.all(np.isfinite(features))


def test_position(document, topic, matrix):
    features = featurize(document, topic, matrix)

    assert features[:, column("position")].tolist() == [0.0, 0.25, 0.5, 0.75]


def test_length_is_capped(document, topic, matrix):
    features = featurize(document, topic, matrix)

    assert features[0, column("length")] == pytest.approx(4 / 30)
    assert features[2, column("length")] == 1.0


def test_topic_overlap(document, topic, matrix):
    features = featurize(document, topic, matrix)

    assert features[0, column("topic_overlap")] == 0.5
    assert features[1, column("topic_overlap")] == 0.0


def test_signals_and_presence_flags(document, topic, matrix):
    features = featurize(document, topic, matrix)

    assert features[:, column("rule")].tolist() == [1.0, 0.0, 0.0, 0.0]
    assert features[:, column("topic_sent")].tolist() == [0.9, 0.1, 0.2, 0.0]
    assert np.all(features[:, column("word_sim")] == 0.0)
    assert np.all(features[:, column("has_rule")] == 1.0)
    assert np.all(features[:, column("has_topic_sent")] == 1.0)
    assert np.all(features[:, column("has_word_sim")] == 0.0)
    assert np.all(features[:, column("has_sent_sent")] == 0.0)


def test_reference_signals_are_not_features(document, topic, matrix):
    without_qa = SignalMatrix(
        doc_id="d1",
        topic_text="Geneva plan",
        n=4,
        values={name: matrix.values[name] for name in ("rule", "topic_sent")},
    )

    assert np.array_equal(
        featurize(document, topic, matrix), featurize(document, topic, without_qa)
    )


def test_matrix_does_not_cover_document(document, topic):
    short = SignalMatrix(
        doc_id="d1", topic_text="Geneva plan", n=2, values={"rule": (1.0, 0.0)}
    )

    with pytest.raises(ScorerError):
        featurize(document, topic, short)
