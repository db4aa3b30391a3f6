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

"""Document store: the canonical JSON lines output of ingestion."""
import dataclasses
import pathlib
from typing import Any, Dict, Iterator, List, Mapping, Optional, Tuple

from weaksum import errors, jsonl

from .errors import IngestError
from .models import Document, EntitySpan, ReferenceSummary, TopicInstance, TopicOrigin


@dataclasses.dataclass(frozen=True)
class StoredDocument:
    """A document with its references, topics and entity spans.

    ``reference`` summarizes the whole document. ``topic_references`` maps a
    topic text to a reference written for that topic alone.
    """

    document: Document
    reference: Optional[ReferenceSummary]
    topics: Tuple[TopicInstance, ...]
    entities: Tuple[EntitySpan, ...]
    topic_references: Mapping[str, ReferenceSummary] = dataclasses.field(
        default_factory=dict
    )

    def topic(self, topic_text: str) -> TopicInstance:
        """Look up one of the document's topics by text.

        :raises KeyError: If the document has no such topic.
        """
        for topic in self.topics:
            if topic.topic_text == topic_text:
                return topic
        raise KeyError((self.document.id, topic_text))

    def reference_for(self, topic_text: str) -> Optional[ReferenceSummary]:
        """Reference of one topic instance, falling back to the document's."""
        return self.topic_references.get(topic_text, self.reference)

    def marshal(self) -> Dict[str, Any]:
        """Create a JSON-serializable dictionary."""
        return {
            "id": self.document.id,
            "source_path": self.document.source_path,
            "sentences": [sentence.text for sentence in self.document.sentences],
            "reference": self.reference.text if self.reference else None,
            "topics": [self._marshal_topic(topic) for topic in self.topics],
            "entities": [
                {
                    "sentence": span.sentence_index,
                    "start": span.token_start,
                    "len": span.token_len,
                    "surface": span.surface,
                }
                for span in self.entities
            ],
        }

    def _marshal_topic(self, topic: TopicInstance) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "text": topic.topic_text,
            "entities": list(topic.topic_entities),
            "origin": topic.origin.value,
        }
        reference = self.topic_references.get(topic.topic_text)
        if reference is not None:
            data["reference"] = reference.text
        return data

    @classmethod
    def unmarshal(cls, data: Dict[str, Any]) -> "StoredDocument":
        """Create a StoredDocument from marshalled data.

        :raises KeyError: On missing keys.
        :raises InvalidDocument: If the data violates the document model.
        """
        doc_id = data["id"]
        document = Document.from_sentences(
            doc_id=doc_id,
            sentences=data["sentences"],
            source_path=data.get("source_path", ""),
        )
        reference = None
        if data.get("reference"):
            reference = ReferenceSummary.from_text(
                doc_id=doc_id, text=data["reference"]
            )

        topic_references = {
            item["text"]: ReferenceSummary.from_text(
                doc_id=doc_id, text=item["reference"]
            )
            for item in data["topics"]
            if item.get("reference")
        }
        topics = tuple(
            TopicInstance(
                doc_id=doc_id,
                topic_text=item["text"],
                topic_entities=tuple(item["entities"]),
                origin=TopicOrigin(item["origin"]),
            )
            for item in data["topics"]
        )
        entities = tuple(
            EntitySpan(
                sentence_index=item["sentence"],
                token_start=item["start"],
                token_len=item["len"],
                surface=item["surface"],
            )
            for item in data["entities"]
        )
        for span in entities:
            span.validate(document)

        return cls(
            document=document,
            reference=reference,
            topics=topics,
            entities=entities,
            topic_references=topic_references,
        )


def write_store(path: pathlib.Path, documents: List[StoredDocument]) -> int:
    """Write the document store atomically.

    :returns: Number of records written.
    """
    return jsonl.write_jsonl_atomic(path, (doc.marshal() for doc in documents))


def read_store(path: pathlib.Path) -> Iterator[StoredDocument]:
    """Read a document store written by :func:`write_store`.

    :raises IngestError: If a record is malformed.
    """
    for line_number, data in jsonl.read_jsonl(path):
        try:
            yield StoredDocument.unmarshal(data)
        except (KeyError, TypeError, ValueError, errors.DataError) as error:
            raise IngestError(
                brief=f"Malformed document store {str(path)!r}.",
                details=errors.details_from_line(
                    path=path, line_number=line_number, reason=repr(error)
                ),
                resolution="Re-run the ingest stage.",
            ) from error
