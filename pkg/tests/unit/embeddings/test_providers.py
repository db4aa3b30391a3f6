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

import json

import numpy as np
import pytest

from weaksum.corpus import Document, ReferenceSummary, provided_topic
from weaksum.embeddings import (
    EmbeddingsError,
    EmbeddingTable,
    MeanVectorProvider,
    PrecomputedVectorProvider,
    sentence_vector,
)


@pytest.fixture()
def table():
    return EmbeddingTable(
        dim=2,
        entries={
            "geneva": np.array([1.0, 0.0]),
            "bank": np.array([0.0, 1.0]),
            "rain": np.array([-1.0, 0.0]),
        },
    )


@pytest.fixture()
def document():
    return Document.from_sentences(
        doc_id="d1",
        sentences=["Geneva Bank grew.", "Heavy rain fell.", "Nothing known."],
    )


def test_sentence_vector(table, document):
    vector = sentence_vector(document.sentences[0], table)

    np.testing.assert_allclose(vector.vector, [0.5, 0.5])
    assert not vector.is_zero
    assert sentence_vector(document.sentences[2], table).is_zero


def test_mean_vector_provider(table, document):
    provider = MeanVectorProvider(table)
    topic = provided_topic(doc_id="d1", topic_text="Geneva")
    reference = ReferenceSummary.from_text(doc_id="d1", text="Rain in Geneva.")

    vectors = provider.sentence_vectors(document)

    assert len(vectors) == 3
    np.testing.assert_allclose(vectors[1].vector, [-1.0, 0.0])
    np.testing.assert_allclose(provider.topic_vector(topic).vector, [1.0, 0.0])
    np.testing.assert_allclose(provider.reference_vector(reference).vector, [0.0, 0.0])


def write_vectors(path, records):
    path.write_text("".join(json.dumps(record) + "\n" for record in records))


def test_precomputed_provider(tmp_path, document):
    path = tmp_path / "vectors.jsonl"
    write_vectors(
        path,
        [
            {"id": "d1", "sentence": 0, "vec": [1, 0]},
            {"id": "d1", "sentence": 1, "vec": [0, 1]},
            {"id": "d1", "sentence": 2, "vec": [1, 1]},
            {"id": "d1", "topic_vec": [2, 0]},
            {"id": "d1", "topic": "Bank", "topic_vec": [0, 2]},
            {"id": "d1", "ref_vec": [3, 3]},
        ],
    )
    provider = PrecomputedVectorProvider(path)

    vectors = provider.sentence_vectors(document)

    assert [list(vector.vector) for vector in vectors] == [[1, 0], [0, 1], [1, 1]]
    assert list(
        provider.topic_vector(provided_topic(doc_id="d1", topic_text="Bank")).vector
    ) == [0, 2]
    assert list(
        provider.topic_vector(provided_topic(doc_id="d1", topic_text="Other")).vector
    ) == [2, 0]
    reference = ReferenceSummary.from_text(doc_id="d1", text="x")
    assert list(provider.reference_vector(reference).vector) == [3, 3]


def test_precomputed_provider_missing_vector(tmp_path, document):
    path = tmp_path / "vectors.jsonl"
    write_vectors(path, [{"id": "d1", "sentence": 0, "vec": [1, 0]}])
    provider = PrecomputedVectorProvider(path)

    with pytest.raises(EmbeddingsError) as exc_info:
        provider.sentence_vectors(document)

    assert exc_info.value == EmbeddingsError(
        brief=f"No precomputed vector in {str(path)!r}.",
        details="* Missing key: ('d1', '1')",
        resolution="Export vectors for every sentence, topic and reference.",
    )


@pytest.mark.parametrize(
    "records",
    [
        [
            {"id": "d1", "sentence": 0, "vec": [1, 0]},
            {"id": "d1", "sentence": 1, "vec": [1]},
        ],
        [{"id": "d1", "sentence": 0, "vec": [1, "x"]}],
        [{"id": "d1", "vec": [1, 0]}],
        [{"id": "d1"}],
    ],
)
def test_precomputed_provider_malformed(tmp_path, records):
    path = tmp_path / "vectors.jsonl"
    write_vectors(path, records)

    with pytest.raises(EmbeddingsError) as exc_info:
        PrecomputedVectorProvider(path)

    assert exc_info.value.brief == f"Malformed sentence vector record in {str(path)!r}."
