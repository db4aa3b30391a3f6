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

"""Topic generation for unlabeled documents."""
import collections
from typing import Dict, List, Tuple

from .entities import capitalized_runs
from .models import Document, EntitySpan, TopicInstance, TopicOrigin
from .text import surface_tokens

DEFAULT_MAX_TOPICS = 5


def generate_topics(
    document: Document, entities: List[EntitySpan], *, max_topics: int
) -> List[TopicInstance]:
    """Turn the most frequent entities of a document into topics.

    Entities are compared case-insensitively.  Topics are ordered by
    frequency (descending), then by first occurrence.

    :param document: Document the entities belong to.
    :param entities: Entity spans in document order.
    :param max_topics: Maximum number of topics to return.

    :returns: Generated topics, possibly empty.

    :raises ValueError: If max_topics is less than 1.
    """
    if max_topics < 1:
        raise ValueError("max_topics must be at least 1")

    counts: Dict[str, int] = collections.Counter()
    first: Dict[str, Tuple[int, str]] = {}

    for order, span in enumerate(entities):
        normalized = span.normalized
        if not normalized:
            continue

        counts[normalized] += 1
        first.setdefault(normalized, (order, span.surface))

    ranked = sorted(counts, key=lambda name: (-counts[name], first[name][0]))

    return [
        TopicInstance(
            doc_id=document.id,
            topic_text=first[name][1],
            topic_entities=(first[name][1],),
            origin=TopicOrigin.GENERATED,
        )
        for name in ranked[:max_topics]
    ]


def provided_topic(*, doc_id: str, topic_text: str) -> TopicInstance:
    """Build a topic given with the data.

    Entities are the capitalized runs of the topic text.  A single
    capitalized word at the start counts, since topics are usually a name.
    """
    tokens = surface_tokens(topic_text)
    entities = tuple(
        " ".join(tokens[start : start + length])
        for start, length in capitalized_runs(tokens, min_initial_run=1)
    )

    return TopicInstance(
        doc_id=doc_id,
        topic_text=topic_text,
        topic_entities=entities,
        origin=TopicOrigin.PROVIDED,
    )
