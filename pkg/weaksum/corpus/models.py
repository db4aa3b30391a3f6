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

"""Canonical document model."""
import dataclasses
import enum
from typing import List, Tuple

from .errors import InvalidDocument
from .text import tokenize


class TopicOrigin(str, enum.Enum):
    """Where a topic came from."""

    PROVIDED = "provided"
    GENERATED = "generated"


@dataclasses.dataclass(frozen=True)
class Sentence:
    """A sentence and its deterministic tokenization."""

    index: int
    text: str
    tokens: Tuple[str, ...]

    @classmethod
    def from_text(cls, *, index: int, text: str) -> "Sentence":
        """Build a sentence from raw text.

        :raises InvalidDocument: If the text has no tokens.
        """
        tokens = tuple(tokenize(text))
        if not tokens:
            raise InvalidDocument(brief=f"Sentence {index} has no tokens.")
        return cls(index=index, text=text, tokens=tokens)


@dataclasses.dataclass(frozen=True)
class Document:
    """An article split into ordered, non-empty sentences."""

    id: str
    sentences: Tuple[Sentence, ...]
    source_path: str = ""

    def __post_init__(self) -> None:
        if not self.sentences:
            raise InvalidDocument(brief=f"Document {self.id!r} has no sentences.")

        for position, sentence in enumerate(self.sentences):
            if sentence.index != position:
                raise InvalidDocument(
                    brief=f"Document {self.id!r} has non-contiguous sentence indices.",
                    details=f"* Expected index {position}, found {sentence.index}",
                )

    @classmethod
    def from_sentences(
        cls, *, doc_id: str, sentences: List[str], source_path: str = ""
    ) -> "Document":
        """Build a document from sentence strings.

        Sentences without tokens are dropped and the rest re-indexed.

        :raises InvalidDocument: If no sentence survives.
        """
        kept = [value for value in sentences if tokenize(value)]
        return cls(
            id=doc_id,
            sentences=tuple(
                Sentence.from_text(index=index, text=value)
                for index, value in enumerate(kept)
            ),
            source_path=source_path,
        )

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def token_count(self) -> int:
        """Total number of tokens over all sentences."""
        return sum(len(sentence.tokens) for sentence in self.sentences)


@dataclasses.dataclass(frozen=True)
class ReferenceSummary:
    """A human (or machine) written abstract for a document."""

    doc_id: str
    text: str
    tokens: Tuple[str, ...]

    @classmethod
    def from_text(cls, *, doc_id: str, text: str) -> "ReferenceSummary":
        """Build a reference summary.

        :raises InvalidDocument: If the text has no tokens.
        """
        tokens = tuple(tokenize(text))
        if not tokens:
            raise InvalidDocument(brief=f"Reference for {doc_id!r} has no tokens.")
        return cls(doc_id=doc_id, text=text, tokens=tokens)


@dataclasses.dataclass(frozen=True)
class TopicInstance:
    """A topic to summarize a document for."""

    doc_id: str
    topic_text: str
    topic_entities: Tuple[str, ...]
    origin: TopicOrigin

    def __post_init__(self) -> None:
        if self.origin == TopicOrigin.GENERATED and not self.topic_entities:
            raise InvalidDocument(
                brief=f"Generated topic {self.topic_text!r} has no entities."
            )

        for entity in self.topic_entities:
            if not tokenize(entity):
                raise InvalidDocument(
                    brief=f"Topic {self.topic_text!r} has an empty entity {entity!r}."
                )

    @property
    def key(self) -> Tuple[str, str]:
        """Instance key used to join stage files."""
        return (self.doc_id, self.topic_text)


@dataclasses.dataclass(frozen=True)
class EntitySpan:
    """An entity occurrence within a sentence, in token coordinates."""

    sentence_index: int
    token_start: int
    token_len: int
    surface: str

    def validate(self, document: Document) -> None:
        """Check the span indexes within its sentence.

        :raises InvalidDocument: If the span is out of bounds.
        """
        if not 0 <= self.sentence_index < len(document):
            raise InvalidDocument(
                brief=f"Entity {self.surface!r} refers to missing sentence "
                f"{self.sentence_index} of {document.id!r}."
            )

        count = len(document.sentences[self.sentence_index].tokens)
        if (
            self.token_len < 1
            or self.token_start < 0
            or self.token_start + self.token_len > count
        ):
            raise InvalidDocument(
                brief=f"Entity {self.surface!r} is out of bounds in sentence "
                f"{self.sentence_index} of {document.id!r}."
            )

    @property
    def normalized(self) -> str:
        """Case-insensitive form used to compare entities."""
        return " ".join(tokenize(self.surface))
