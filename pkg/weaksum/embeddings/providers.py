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

"""Sentence vector providers.

Sentence-level signals only need a fixed-size vector for the topic, each
sentence and the reference.  MeanVectorProvider averages word vectors;
PrecomputedVectorProvider reads vectors exported offline by any sentence
encoder.
"""
import dataclasses
import logging
import pathlib
from abc import ABC, abstractmethod
from typing import Dict, List, Optional, Tuple

import numpy as np

from weaksum import errors, jsonl
from weaksum.corpus import Document, ReferenceSummary, Sentence, TopicInstance, tokenize

from .errors import EmbeddingsError
from .table import EmbeddingTable

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class SentenceVector:
    """A sentence embedding."""

    vector: np.ndarray

    @property
    def is_zero(self) -> bool:
        """True when every component is 0."""
        return not np.any(self.vector)

    @classmethod
    def of(cls, vector) -> "SentenceVector":
        """Wrap vector as a float64 array."""
        return cls(vector=np.asarray(vector, dtype=np.float64))


def sentence_vector(sentence: Sentence, table: EmbeddingTable) -> SentenceVector:
    """Mean of the in-vocabulary token vectors of sentence."""
    return SentenceVector.of(table.mean_vector(sentence.tokens))


class SentenceVectorProvider(ABC):
    """Interface to embed topics, sentences and references."""

    @abstractmethod
    def sentence_vectors(self, document: Document) -> List[SentenceVector]:
        """Embed every sentence of document, in order."""

    @abstractmethod
    def topic_vector(self, topic: TopicInstance) -> SentenceVector:
        """Embed a topic as a one-sentence input."""

    @abstractmethod
    def reference_vector(self, reference: ReferenceSummary) -> SentenceVector:
        """Embed the full text of a reference summary."""


class MeanVectorProvider(SentenceVectorProvider):
    """Average of word vectors.

    :param table: Word vectors.
    """

    def __init__(self, table: EmbeddingTable) -> None:
        self.table = table

    def sentence_vectors(self, document: Document) -> List[SentenceVector]:
        return [
            sentence_vector(sentence, self.table) for sentence in document.sentences
        ]

    def topic_vector(self, topic: TopicInstance) -> SentenceVector:
        return SentenceVector.of(self.table.mean_vector(tokenize(topic.topic_text)))

    def reference_vector(self, reference: ReferenceSummary) -> SentenceVector:
        return SentenceVector.of(self.table.mean_vector(reference.tokens))


class PrecomputedVectorProvider(SentenceVectorProvider):
    """Vectors read from a JSON lines file.

    Records are one of::

        {"id": str, "sentence": int, "vec": [real]}
        {"id": str, "topic_vec": [real], "topic": str?}
        {"id": str, "ref_vec": [real]}

    A topic vector without "topic" applies to every topic of the document.

    :param path: Vector file.

    :raises EmbeddingsError: If the file is malformed.
    """

    def __init__(self, path: pathlib.Path) -> None:
        self.path = path
        self._sentences: Dict[Tuple[str, int], np.ndarray] = {}
        self._topics: Dict[Tuple[str, Optional[str]], np.ndarray] = {}
        self._references: Dict[str, np.ndarray] = {}
        self.dim: Optional[int] = None

        for line_number, record in jsonl.read_jsonl(path):
            try:
                self._add(record)
            except (KeyError, TypeError, ValueError) as error:
                raise EmbeddingsError(
                    brief=f"Malformed sentence vector record in {str(path)!r}.",
                    details=errors.details_from_line(
                        path=path, line_number=line_number, reason=repr(error)
                    ),
                ) from error

    def _vector(self, values) -> np.ndarray:
        vector = np.array([float(value) for value in values], dtype=np.float64)
        if self.dim is None:
            self.dim = len(vector)
        if len(vector) != self.dim or not np.all(np.isfinite(vector)):
            raise ValueError(f"vector must be {self.dim} finite components")
        return vector

    def _add(self, record) -> None:
        doc_id = str(record["id"])
        if "vec" in record:
            self._sentences[(doc_id, int(record["sentence"]))] = self._vector(
                record["vec"]
            )
        elif "topic_vec" in record:
            self._topics[(doc_id, record.get("topic"))] = self._vector(
                record["topic_vec"]
            )
        elif "ref_vec" in record:
            self._references[doc_id] = self._vector(record["ref_vec"])
        else:
            raise KeyError("vec, topic_vec or ref_vec")

    def _missing(self, key) -> EmbeddingsError:
        return EmbeddingsError(
            brief=f"No precomputed vector in {str(self.path)!r}.",
            details=errors.details_from_missing_keys(
                [tuple(str(part) for part in key)]
            ),
            resolution="Export vectors for every sentence, topic and reference.",
        )

    def sentence_vectors(self, document: Document) -> List[SentenceVector]:
        vectors = []
        for sentence in document.sentences:
            key = (document.id, sentence.index)
            if key not in self._sentences:
                raise self._missing(key)
            vectors.append(SentenceVector.of(self._sentences[key]))
        return vectors

    def topic_vector(self, topic: TopicInstance) -> SentenceVector:
        for key in ((topic.doc_id, topic.topic_text), (topic.doc_id, None)):
            if key in self._topics:
                return SentenceVector.of(self._topics[key])
        raise self._missing((topic.doc_id, topic.topic_text))

    def reference_vector(self, reference: ReferenceSummary) -> SentenceVector:
        if reference.doc_id not in self._references:
            raise self._missing((reference.doc_id,))
        return SentenceVector.of(self._references[reference.doc_id])
