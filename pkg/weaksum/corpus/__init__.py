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

"""Corpus ingestion and the document model."""

from .entities import (  # noqa: F401
    EntityExtractor,
    FileEntityExtractor,
    HeuristicEntityExtractor,
    extract_entities,
)
from .errors import IngestError, InvalidDocument  # noqa: F401
from .ingest import CorpusFormat, Ingester, IngestRecord, ingest  # noqa: F401
from .models import (  # noqa: F401
    Document,
    EntitySpan,
    ReferenceSummary,
    Sentence,
    TopicInstance,
    TopicOrigin,
)
from .store import StoredDocument, read_store, write_store  # noqa: F401
from .text import split_sentences, surface_tokens, tokenize  # noqa: F401
from .topics import generate_topics, provided_topic  # noqa: F401
