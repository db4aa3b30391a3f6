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

"""Per-sentence supervision signals.

Seven signals are known, each a list of values in [0, 1] with one value per
sentence:

* ``ext``: general extractive labels aligned from the reference summary;
* ``rule``: 1 when a topic keyword occurs in the sentence;
* ``word_sim``: best clamped cosine between sentence and topic entities;
* ``topic_sent``: clamped cosine between topic and sentence vectors;
* ``ref_sent``: clamped cosine between reference and sentence vectors;
* ``sent_sent``: mean clamped cosine to every other sentence;
* ``qa``: label of the sentence holding an external QA answer.

Signals whose inputs are missing (no reference, no QA answer, no topic
entities) are omitted from the matrix rather than zero-filled.
"""
import dataclasses
import logging
import pathlib
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from weaksum import alignment, errors, jsonl
from weaksum.corpus import (
    Document,
    EntitySpan,
    ReferenceSummary,
    TopicInstance,
    tokenize,
)
from weaksum.embeddings import EmbeddingTable, SentenceVectorProvider, cosine

logger = logging.getLogger(__name__)

SIGNAL_NAMES = ("ext", "rule", "word_sim", "topic_sent", "ref_sent", "sent_sent", "qa")
BINARY_SIGNALS = frozenset({"ext", "rule", "qa"})

STOPWORDS = frozenset(
    """
    a an and are as at be but by for from has have he her his i in is it its
    of on or our she that the their them they this to was we were what when
    where which who will with you your
    """.split()
)


@dataclasses.dataclass(frozen=True)
class SignalMatrix:
    """Signals computed for one (document, topic) instance."""

    doc_id: str
    topic_text: str
    n: int
    values: Mapping[str, Tuple[float, ...]]

    def __post_init__(self) -> None:
        self.validate()

    @property
    def present(self) -> List[str]:
        """Present signal names, in canonical order."""
        return [name for name in SIGNAL_NAMES if name in self.values]

    @property
    def key(self) -> Tuple[str, str]:
        """Instance key used to join stage files."""
        return (self.doc_id, self.topic_text)

    def validate(self) -> None:
        """Check the matrix invariants.

        :raises SignalError: On unknown names, wrong lengths or values out of
            range.
        """
        if not self.values:
            raise errors.SignalError(brief=f"No signal present for {self.key!r}.")

        for name, values in self.values.items():
            if name not in SIGNAL_NAMES:
                raise errors.SignalError(brief=f"Unknown signal {name!r}.")

            if len(values) != self.n:
                raise errors.SignalError(
                    brief=f"Signal {name!r} of {self.doc_id!r} has {len(values)} "
                    f"values for {self.n} sentences."
                )

            for value in values:
                if not 0.0 <= value <= 1.0:
                    raise errors.SignalError(
                        brief=f"Signal {name!r} of {self.doc_id!r} has value "
                        f"{value!r} outside [0, 1]."
                    )
                if name in BINARY_SIGNALS and value not in (0.0, 1.0):
                    raise errors.SignalError(
                        brief=f"Signal {name!r} of {self.doc_id!r} is not binary."
                    )

    def marshal(self) -> Dict:
        """Create a JSON-serializable dictionary, values to 6 decimals."""
        return {
            "id": self.doc_id,
            "topic": self.topic_text,
            "signals": {
                name: [round(float(value), 6) for value in self.values[name]]
                for name in self.present
            },
        }

    @classmethod
    def unmarshal(cls, data: Dict) -> "SignalMatrix":
        """Create a SignalMatrix from marshalled data."""
        values = {name: tuple(row) for name, row in data["signals"].items()}
        lengths = {len(row) for row in values.values()}
        return cls(
            doc_id=data["id"],
            topic_text=data["topic"],
            n=lengths.pop() if len(lengths) == 1 else -1,
            values=values,
        )


def _clamp(value: float) -> float:
    return min(1.0, max(0.0, value))


def topic_keywords(topic: TopicInstance) -> List[Tuple[str, ...]]:
    """Keywords of a topic as token sequences.

    Topic entities are the keywords when present; otherwise every topic
    token outside the stopword list is a keyword.
    """
    if topic.topic_entities:
        keywords = [tuple(tokenize(entity)) for entity in topic.topic_entities]
    else:
        keywords = [
            (token,) for token in tokenize(topic.topic_text) if token not in STOPWORDS
        ]
    return [keyword for keyword in keywords if keyword]


def _contains(tokens: Sequence[str], keyword: Sequence[str]) -> bool:
    width = len(keyword)
    return any(
        tuple(tokens[start : start + width]) == tuple(keyword)
        for start in range(len(tokens) - width + 1)
    )


def rule_signal(document: Document, topic: TopicInstance) -> List[float]:
    """1 for sentences containing a topic keyword as contiguous tokens.

    :raises SignalError: If the topic has no keywords.
    """
    keywords = topic_keywords(topic)
    if not keywords:
        raise errors.SignalError(
            brief=f"Topic {topic.topic_text!r} of {topic.doc_id!r} has no keywords.",
            resolution="Skip this instance.",
        )

    return [
        1.0 if any(_contains(sentence.tokens, keyword) for keyword in keywords) else 0.0
        for sentence in document.sentences
    ]


def _entity_vector(surface: str, table: EmbeddingTable) -> np.ndarray:
    return table.mean_vector(tokenize(surface))


def word_sim_signal(
    document: Document,
    entities: Iterable[EntitySpan],
    topic_entities: Sequence[str],
    table: EmbeddingTable,
) -> List[float]:
    """Best clamped cosine between any sentence entity and any topic entity.

    Multi-token entities are embedded as the mean of their token vectors.
    Sentences without entities get 0.

    :raises SignalError: If topic_entities is empty.
    """
    if not topic_entities:
        raise errors.SignalError(brief="Word similarity needs topic entities.")

    topic_vectors = [_entity_vector(entity, table) for entity in topic_entities]
    values = [0.0] * len(document)
    cache: Dict[str, float] = {}

    for span in entities:
        normalized = span.normalized
        if normalized not in cache:
            vector = _entity_vector(span.surface, table)
            cache[normalized] = max(
                _clamp(cosine(vector, topic_vector)) for topic_vector in topic_vectors
            )
        index = span.sentence_index
        values[index] = max(values[index], cache[normalized])

    return values


def topic_sent_signal(
    document: Document, topic: TopicInstance, provider: SentenceVectorProvider
) -> List[float]:
    """Clamped cosine between the topic vector and each sentence vector."""
    topic_vector = provider.topic_vector(topic).vector
    return [
        _clamp(cosine(topic_vector, sentence.vector))
        for sentence in provider.sentence_vectors(document)
    ]


def ref_sent_signal(
    document: Document, reference: ReferenceSummary, provider: SentenceVectorProvider
) -> List[float]:
    """Clamped cosine between the reference vector and each sentence vector."""
    reference_vector = provider.reference_vector(reference).vector
    return [
        _clamp(cosine(reference_vector, sentence.vector))
        for sentence in provider.sentence_vectors(document)
    ]


def sent_sent_signal(
    document: Document, provider: SentenceVectorProvider
) -> List[float]:
    """Mean clamped cosine of each sentence to every other sentence.

    A one-sentence document gets [0].
    """
    vectors = [sentence.vector for sentence in provider.sentence_vectors(document)]
    n = len(vectors)
    if n < 2:
        return [0.0] * n

    pairwise = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            pairwise[i, j] = pairwise[j, i] = _clamp(cosine(vectors[i], vectors[j]))

    return [_clamp(float(total) / (n - 1)) for total in pairwise.sum(axis=1)]


def ext_signal(
    document: Document,
    reference: ReferenceSummary,
    *,
    max_select: int = alignment.DEFAULT_REFERENCE_MAX_SELECT,
) -> List[float]:
    """General extractive labels from the reference summary."""
    labels = alignment.greedy_align(document, reference.text, max_select=max_select)
    return [float(label) for label in labels.labels]


def qa_signal(
    document: Document,
    answer_text: str,
    *,
    max_select: int = alignment.DEFAULT_QA_MAX_SELECT,
) -> List[float]:
    """Labels of the sentence an external QA answer was taken from."""
    labels = alignment.qa_labels(document, answer_text, max_select=max_select)
    return [float(label) for label in labels.labels]


class SignalBuilder:
    """Compute every enabled signal for (document, topic) instances.

    :param table: Word vectors for the word similarity signal.
    :param provider: Sentence vectors for sentence-level signals.
    :param enabled: Signal names to compute; all by default.
    :param ext_max_select: Sentences aligned to the reference.
    :param qa_max_select: Sentences aligned to a QA answer.

    :raises SignalError: If enabled names an unknown signal.
    """

    def __init__(
        self,
        *,
        table: EmbeddingTable,
        provider: SentenceVectorProvider,
        enabled: Optional[Iterable[str]] = None,
        ext_max_select: int = alignment.DEFAULT_REFERENCE_MAX_SELECT,
        qa_max_select: int = alignment.DEFAULT_QA_MAX_SELECT,
    ) -> None:
        self.table = table
        self.provider = provider
        self.enabled = frozenset(SIGNAL_NAMES if enabled is None else enabled)
        self.ext_max_select = ext_max_select
        self.qa_max_select = qa_max_select

        unknown = self.enabled - set(SIGNAL_NAMES)
        if unknown:
            raise errors.SignalError(brief=f"Unknown signals {sorted(unknown)!r}.")

    def build(
        self,
        document: Document,
        topic: TopicInstance,
        *,
        entities: Sequence[EntitySpan] = (),
        reference: Optional[ReferenceSummary] = None,
        qa_answer: Optional[str] = None,
    ) -> SignalMatrix:
        """Compute the signal matrix of one instance.

        :param document: Document to score.
        :param topic: Topic of the instance.
        :param entities: Entity spans of the document.
        :param reference: General reference summary, if any.
        :param qa_answer: Answer of an external QA model, if any.

        :raises SignalError: If a signal fails or no signal is present.
        """
        values: Dict[str, List[float]] = {}

        if "ext" in self.enabled and reference is not None:
            values["ext"] = ext_signal(
                document, reference, max_select=self.ext_max_select
            )

        if "rule" in self.enabled:
            values["rule"] = rule_signal(document, topic)

        if "word_sim" in self.enabled and topic.topic_entities:
            values["word_sim"] = word_sim_signal(
                document, entities, topic.topic_entities, self.table
            )

        if "topic_sent" in self.enabled:
            values["topic_sent"] = topic_sent_signal(document, topic, self.provider)

        if "ref_sent" in self.enabled and reference is not None:
            values["ref_sent"] = ref_sent_signal(document, reference, self.provider)

        if "sent_sent" in self.enabled:
            values["sent_sent"] = sent_sent_signal(document, self.provider)

        if "qa" in self.enabled and qa_answer is not None:
            values["qa"] = qa_signal(document, qa_answer, max_select=self.qa_max_select)

        if not values:
            raise errors.SignalError(
                brief=f"No signal present for {topic.key!r}.",
                resolution="Enable more signals or provide references/QA answers.",
            )

        logger.debug("Built signals %s for %r", sorted(values), topic.key)
        return SignalMatrix(
            doc_id=document.id,
            topic_text=topic.topic_text,
            n=len(document),
            values={name: tuple(row) for name, row in values.items()},
        )


def load_qa_answers(path: pathlib.Path) -> Dict[Tuple[str, str], str]:
    """Read QA answers keyed by (id, topic).

    :raises DataError: If a record is malformed.
    """
    answers = {}
    for line_number, record in jsonl.read_jsonl(path):
        try:
            answers[(str(record["id"]), str(record["topic"]))] = str(record["answer"])
        except (KeyError, TypeError) as error:
            raise errors.DataError(
                brief=f"Malformed QA answer record in {str(path)!r}.",
                details=errors.details_from_line(
                    path=path, line_number=line_number, reason=repr(error)
                ),
            ) from error
    return answers


def write_matrices(path: pathlib.Path, matrices: Iterable[SignalMatrix]) -> int:
    """Write signal matrices sorted by (id, topic), atomically."""
    ordered = sorted(matrices, key=lambda matrix: matrix.key)
    return jsonl.write_jsonl_atomic(path, (matrix.marshal() for matrix in ordered))


def read_matrices(path: pathlib.Path) -> List[SignalMatrix]:
    """Read signal matrices written by :func:`write_matrices`.

    :raises SignalError: If a record is malformed.
    """
    matrices = []
    for line_number, record in jsonl.read_jsonl(path):
        try:
            matrices.append(SignalMatrix.unmarshal(record))
        except (KeyError, TypeError, ValueError, errors.SignalError) as error:
            raise errors.SignalError(
                brief=f"Malformed signal file {str(path)!r}.",
                details=errors.details_from_line(
                    path=path, line_number=line_number, reason=repr(error)
                ),
            ) from error
    return matrices
