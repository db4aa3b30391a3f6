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

"""Corpus ingestion.

Two input formats are understood:

* ``stories``: one plain-text file per article, the article body followed
  by ``@highlight`` lines, each introducing one reference sentence.
* ``jsonl``: one object per line,
  ``{"id": str, "document": str, "reference": str?, "topic": str?}``.
"""
import enum
import json
import logging
import pathlib
from typing import Iterable, Iterator, List, NamedTuple, Optional, Set, Tuple

from weaksum import errors

from .errors import IngestError, InvalidDocument
from .models import Document, ReferenceSummary, TopicInstance
from .text import split_sentences, tokenize
from .topics import provided_topic

logger = logging.getLogger(__name__)

DEFAULT_MAX_SENTENCES = 50


class CorpusFormat(str, enum.Enum):
    """Supported corpus formats."""

    STORIES = "stories"
    JSONL = "jsonl"


class IngestRecord(NamedTuple):
    """A validated document with its optional reference and topic."""

    document: Document
    reference: Optional[ReferenceSummary] = None
    topic: Optional[TopicInstance] = None


def parse_story(text: str) -> Tuple[str, List[str]]:
    """Split a story file into its body and highlight sentences.

    :param text: Story file content.

    :returns: Tuple of (body, highlights).
    """
    body: List[str] = []
    highlights: List[str] = []
    in_highlight = False
    seen_highlight = False

    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("@highlight"):
            in_highlight = True
            seen_highlight = True
            remainder = stripped[len("@highlight") :].strip()
            if remainder:
                highlights.append(remainder)
                in_highlight = False
            continue

        if not stripped:
            continue

        if in_highlight:
            highlights.append(stripped)
            in_highlight = False
        elif not seen_highlight:
            body.append(stripped)

    return " ".join(body), highlights


class Ingester:
    """Stream validated records out of a corpus directory.

    Files are read in sorted order.  Records that fail validation are
    skipped, logged and counted in :attr:`skipped`.

    :param corpus_dir: Directory holding corpus files, or a single file.
    :param corpus_format: Format of the files.
    :param max_sentences: Documents are truncated to their first sentences.
    :param abbreviations: Abbreviations for the sentence splitter.
    """

    def __init__(
        self,
        *,
        corpus_dir: pathlib.Path,
        corpus_format: CorpusFormat,
        max_sentences: int = DEFAULT_MAX_SENTENCES,
        abbreviations: Optional[Iterable[str]] = None,
    ) -> None:
        self.corpus_dir = corpus_dir
        self.corpus_format = CorpusFormat(corpus_format)
        self.max_sentences = max_sentences
        self.abbreviations = (
            frozenset(abbreviations) if abbreviations is not None else None
        )
        self.documents = 0
        self.skipped = 0
        self._seen: Set[Tuple[str, Optional[str]]] = set()

    def _files(self) -> List[pathlib.Path]:
        if self.corpus_dir.is_file():
            return [self.corpus_dir]

        if not self.corpus_dir.is_dir():
            raise IngestError(
                brief=f"Corpus directory {str(self.corpus_dir)!r} does not exist.",
                resolution="Check the corpus path in the run configuration.",
            )

        suffix = ".story" if self.corpus_format == CorpusFormat.STORIES else ".jsonl"
        return sorted(
            path for path in self.corpus_dir.iterdir() if path.suffix == suffix
        )

    def _read(self, path: pathlib.Path) -> str:
        try:
            return path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as error:
            raise IngestError(
                brief=f"Failed to read corpus file {str(path)!r}.",
                details=str(error),
            ) from error

    def _skip(self, reason: str) -> None:
        self.skipped += 1
        logger.warning("Skipping record: %s", reason)

    def _build(
        self,
        *,
        doc_id: str,
        body: str,
        reference: Optional[str],
        topic: Optional[str],
        source_path: pathlib.Path,
    ) -> IngestRecord:
        sentences = [
            sentence
            for sentence in split_sentences(body, abbreviations=self.abbreviations)
            if tokenize(sentence)
        ]
        document = Document.from_sentences(
            doc_id=doc_id,
            sentences=sentences[: self.max_sentences],
            source_path=str(source_path),
        )

        summary = None
        if reference is not None and reference.strip():
            summary = ReferenceSummary.from_text(doc_id=doc_id, text=reference)

        instance = None
        if topic is not None:
            instance = provided_topic(doc_id=doc_id, topic_text=topic)

        return IngestRecord(document=document, reference=summary, topic=instance)

    def _accept(self, record: IngestRecord) -> bool:
        key = (
            record.document.id,
            record.topic.topic_text if record.topic else None,
        )
        if key in self._seen:
            self._skip(f"duplicate instance {key!r}")
            return False

        self._seen.add(key)
        self.documents += 1
        return True

    def _stories(self, path: pathlib.Path) -> Iterator[IngestRecord]:
        body, highlights = parse_story(self._read(path))
        try:
            record = self._build(
                doc_id=path.stem,
                body=body,
                reference=" ".join(highlights) if highlights else None,
                topic=None,
                source_path=path,
            )
        except InvalidDocument as error:
            self._skip(f"{str(path)!r}: {error.brief}")
            return

        if self._accept(record):
            yield record

    def _jsonl(self, path: pathlib.Path) -> Iterator[IngestRecord]:
        for line_number, line in enumerate(self._read(path).splitlines(), start=1):
            if not line.strip():
                continue

            location = errors.details_from_line(path=path, line_number=line_number)
            try:
                data = json.loads(line)
                doc_id = data["id"]
                body = data["document"]
                reference = data.get("reference")
                topic = data.get("topic")
                if not isinstance(doc_id, str) or not isinstance(body, str):
                    raise TypeError("'id' and 'document' must be strings")
                if reference is not None and not isinstance(reference, str):
                    raise TypeError("'reference' must be a string")
                if topic is not None and not isinstance(topic, str):
                    raise TypeError("'topic' must be a string")
            except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as error:
                self._skip(f"malformed record ({error!r})\n{location}")
                continue

            try:
                record = self._build(
                    doc_id=doc_id,
                    body=body,
                    reference=reference,
                    topic=topic,
                    source_path=path,
                )
            except InvalidDocument as error:
                self._skip(f"{error.brief}\n{location}")
                continue

            if self._accept(record):
                yield record

    def records(self) -> Iterator[IngestRecord]:
        """Yield every valid record of the corpus.

        :raises IngestError: If the corpus or one of its files is unreadable.
        """
        reader = (
            self._stories if self.corpus_format == CorpusFormat.STORIES else self._jsonl
        )
        for path in self._files():
            logger.debug("Ingesting %s", path)
            yield from reader(path)


def ingest(
    corpus_dir: pathlib.Path,
    corpus_format: CorpusFormat,
    **kwargs,
) -> Iterator[IngestRecord]:
    """Stream (Document, ReferenceSummary?, TopicInstance?) records.

    Convenience wrapper around :class:`Ingester` when skip counts are not
    needed.
    """
    ingester = Ingester(corpus_dir=corpus_dir, corpus_format=corpus_format, **kwargs)
    return ingester.records()
