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

"""Deterministic tokenization and sentence segmentation.

All metrics in weaksum are defined over these tokens, so the rules here are
kept simple and stable:

* tokens are whitespace-separated, lowercased, with leading and trailing
  punctuation stripped (internal hyphens, apostrophes and periods are kept);
* sentences end at ., ! or ? followed by whitespace and an
  uppercase letter, or at the end of the text, unless the word carrying the
  terminator is a known abbreviation.
"""
import string
import unicodedata
from typing import Iterable, List, Optional

DEFAULT_ABBREVIATIONS = frozenset({"mr", "mrs", "dr", "st", "u.s"})

_TERMINATORS = ".!?"


def _is_punctuation(char: str) -> bool:
    return char in string.punctuation or unicodedata.category(char).startswith("P")


def _strip_punctuation(word: str) -> str:
    start = 0
    end = len(word)

    while start < end and _is_punctuation(word[start]):
        start += 1

    while end > start and _is_punctuation(word[end - 1]):
        end -= 1

    return word[start:end]


def surface_tokens(text: str) -> List[str]:
    """Split text into original-case tokens.

    The result is aligned 1:1 with :func:`tokenize`.

    :param text: Text to split.

    :returns: Tokens with leading/trailing punctuation removed.
    """
    tokens = []
    for word in text.split():
        stripped = _strip_punctuation(word)
        if stripped:
            tokens.append(stripped)
    return tokens


def tokenize(text: str) -> List[str]:
    """Tokenize text into lowercased tokens.

    :param text: Text to tokenize.

    :returns: List of tokens, empty for empty input.
    """
    return [token.lower() for token in surface_tokens(text)]


def _preceding_word(text: str, position: int) -> str:
    start = position
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return _strip_punctuation(text[start:position]).lower()


def _is_boundary(text: str, position: int, abbreviations: Iterable[str]) -> bool:
    following = position + 1
    if following < len(text) and not text[following].isspace():
        return False

    while following < len(text) and text[following].isspace():
        following += 1

    if following < len(text) and not text[following].isupper():
        return False

    return _preceding_word(text, position) not in abbreviations


def split_sentences(
    text: str, *, abbreviations: Optional[Iterable[str]] = None
) -> List[str]:
    """Split text into sentences.

    :param text: Text to split.
    :param abbreviations: Lowercased words (without the final period) that do
        not end a sentence.  Defaults to DEFAULT_ABBREVIATIONS.

    :returns: Sentences with surrounding whitespace removed.
    """
    if abbreviations is None:
        abbreviations = DEFAULT_ABBREVIATIONS
    abbreviations = frozenset(abbreviations)

    sentences = []
    start = 0
    for position, char in enumerate(text):
        if char not in _TERMINATORS:
            continue

        if not _is_boundary(text, position, abbreviations):
            continue

        sentence = text[start : position + 1].strip()
        if sentence:
            sentences.append(sentence)
        start = position + 1

    remainder = text[start:].strip()
    if remainder:
        sentences.append(remainder)

    return sentences
