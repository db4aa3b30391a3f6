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

"""Entity extraction.

The default extractor is a capitalization heuristic.  When better entities
are available (e.g. from an offline NER run), FileEntityExtractor reads them
from a JSON lines file and the heuristic is bypassed.
"""
import logging
import pathlib
from abc import ABC, abstractmethod
from typing import Dict, List, Optional, Tuple

from weaksum import errors, jsonl

from .errors import IngestError, InvalidDocument
from .models import Document, EntitySpan
from .text import surface_tokens

logger = logging.getLogger(__name__)


def _is_capitalized(token: str) -> bool:
    return token[:1].isupper()


def capitalized_runs(
    tokens: List[str], *, min_initial_run: int = 2
) -> List[Tuple[int, int]]:
    """Find maximal runs of capitalized tokens.

    :param tokens: Original-case tokens of one sentence.
    :param min_initial_run: Minimum length of a run starting at token 0.

    :returns: List of (start, length) pairs.
    """
    runs = []
    start = None

    for position, token in enumerate([*tokens, ""]):
        if token and _is_capitalized(token):
            if start is None:
                start = position
            continue

        if start is not None:
            length = position - start
            if start > 0 or length >= min_initial_run:
                runs.append((start, length))
            start = None

    return runs


class EntityExtractor(ABC):
    """Interface to find entity occurrences in a document."""

    @abstractmethod
    def extract(self, document: Document) -> List[EntitySpan]:
        """Extract entity spans in document order.

        :param document: Document to scan.

        :returns: Every occurrence as its own span.
        """


class HeuristicEntityExtractor(EntityExtractor):
    """Entities are runs of capitalized tokens.

    Runs at the start of a sentence only count when they are at least two
    tokens long, since the first word of a sentence is capitalized anyway.
    """

    def extract(self, document: Document) -> List[EntitySpan]:
        spans = []
        for sentence in document.sentences:
            tokens = surface_tokens(sentence.text)
            for start, length in capitalized_runs(tokens):
                spans.append(
                    EntitySpan(
                        sentence_index=sentence.index,
                        token_start=start,
                        token_len=length,
                        surface=" ".join(tokens[start : start + length]),
                    )
                )
        return spans


class FileEntityExtractor(EntityExtractor):
    """Entities precomputed per document, read from a JSON lines file.

    :param path: File of {"id": str, "entities": [{"sentence", "start",
        "len", "surface"}]} records.

    :raises IngestError: If the file cannot be parsed.
    """

    def __init__(self, path: pathlib.Path) -> None:
        self.path = path
        self._entities: Dict[str, List[EntitySpan]] = {}

        for line_number, record in jsonl.read_jsonl(path):
            try:
                doc_id = str(record["id"])
                spans = [
                    EntitySpan(
                        sentence_index=int(item["sentence"]),
                        token_start=int(item["start"]),
                        token_len=int(item["len"]),
                        surface=str(item["surface"]),
                    )
                    for item in record["entities"]
                ]
            except (KeyError, TypeError, ValueError) as error:
                raise IngestError(
                    brief=f"Malformed entity record in {str(path)!r}.",
                    details=errors.details_from_line(
                        path=path, line_number=line_number, reason=repr(error)
                    ),
                ) from error

            self._entities.setdefault(doc_id, []).extend(spans)

    def extract(self, document: Document) -> List[EntitySpan]:
        spans = []
        for span in self._entities.get(document.id, []):
            try:
                span.validate(document)
            except InvalidDocument as error:
                logger.warning("Ignoring precomputed entity: %s", error.brief)
                continue
            spans.append(span)

        if document.id not in self._entities:
            logger.debug("No precomputed entities for %r", document.id)

        return spans


def extract_entities(
    document: Document, extractor: Optional[EntityExtractor] = None
) -> List[EntitySpan]:
    """Extract entity spans, with the capitalization heuristic by default.

    :param document: Document to scan.
    :param extractor: Extractor to use instead of the heuristic.
    """
    if extractor is None:
        extractor = HeuristicEntityExtractor()
    return extractor.extract(document)
