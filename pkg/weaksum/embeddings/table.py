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

"""Word vector table and the cosine similarity primitive."""
import logging
import pathlib
from typing import Dict, Iterable, Optional

import numpy as np

from weaksum import errors

from .errors import EmbeddingsError

logger = logging.getLogger(__name__)


class EmbeddingTable:
    """Read-only mapping of token to a float64 vector of length dim.

    :param dim: Vector dimension.
    :param entries: Token vectors.

    :raises EmbeddingsError: If a vector has the wrong length or is not finite.
    """

    def __init__(self, *, dim: int, entries: Dict[str, np.ndarray]) -> None:
        if dim < 1:
            raise EmbeddingsError(brief=f"Invalid embedding dimension {dim}.")

        self.dim = dim
        self._entries: Dict[str, np.ndarray] = {}

        for token, vector in entries.items():
            array = np.asarray(vector, dtype=np.float64)
            if array.shape != (dim,):
                raise EmbeddingsError(
                    brief=f"Vector for {token!r} has shape {array.shape}, "
                    f"expected ({dim},)."
                )
            if not np.all(np.isfinite(array)):
                raise EmbeddingsError(brief=f"Vector for {token!r} is not finite.")
            array.setflags(write=False)
            self._entries[token] = array

    def __contains__(self, token: str) -> bool:
        return token in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, token: str) -> Optional[np.ndarray]:
        """Get the vector of token, or None when out of vocabulary."""
        return self._entries.get(token)

    def mean_vector(self, tokens: Iterable[str]) -> np.ndarray:
        """Average the vectors of in-vocabulary tokens.

        :returns: Mean vector, or the zero vector if every token is OOV.
        """
        vectors = [self._entries[token] for token in tokens if token in self._entries]
        if not vectors:
            return np.zeros(self.dim, dtype=np.float64)
        return np.mean(vectors, axis=0)


def _is_header(fields) -> bool:
    if len(fields) != 2:
        return False
    return all(field.isdigit() for field in fields)


def load_embeddings(path: pathlib.Path) -> EmbeddingTable:
    """Load word vectors from a text file.

    One entry per line: ``token v1 v2 ... vd``.  An optional ``COUNT DIM``
    header line is detected and skipped.  Duplicate tokens keep their first
    vector.

    :param path: Embedding file.

    :returns: Loaded table.

    :raises EmbeddingsError: On unreadable files, dimension mismatches or
        non-numeric components.
    """
    entries: Dict[str, np.ndarray] = {}
    dim: Optional[int] = None
    duplicates = 0

    try:
        handle = open(path, encoding="utf-8")
    except OSError as error:
        raise EmbeddingsError(
            brief=f"Failed to read embeddings {str(path)!r}.", details=str(error)
        ) from error

    with handle:
        for line_number, line in enumerate(handle, start=1):
            fields = line.split()
            if not fields:
                continue

            if line_number == 1 and _is_header(fields):
                dim = int(fields[1])
                continue

            token, components = fields[0], fields[1:]
            if dim is None:
                dim = len(components)

            if len(components) != dim:
                raise EmbeddingsError(
                    brief=f"Dimension mismatch in embeddings {str(path)!r}.",
                    details=errors.details_from_line(
                        path=path,
                        line_number=line_number,
                        reason=f"expected {dim} components, found {len(components)}",
                    ),
                )

            try:
                vector = np.array([float(value) for value in components])
            except ValueError as error:
                raise EmbeddingsError(
                    brief=f"Non-numeric component in embeddings {str(path)!r}.",
                    details=errors.details_from_line(
                        path=path, line_number=line_number, reason=str(error)
                    ),
                ) from error

            if not np.all(np.isfinite(vector)):
                raise EmbeddingsError(
                    brief=f"Non-finite component in embeddings {str(path)!r}.",
                    details=errors.details_from_line(
                        path=path, line_number=line_number
                    ),
                )

            if token in entries:
                duplicates += 1
                continue

            entries[token] = vector

    if dim is None or dim < 1:
        raise EmbeddingsError(brief=f"Embeddings file {str(path)!r} is empty.")

    if duplicates:
        logger.debug("Ignored %d duplicate tokens in %s", duplicates, path)

    return EmbeddingTable(dim=dim, entries=entries)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity of two vectors.

    Zero vectors have similarity 0 with everything.

    :raises EmbeddingsError: If the vectors differ in length.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)

    if u.shape != v.shape:
        raise EmbeddingsError(
            brief=f"Cannot compare vectors of shapes {u.shape} and {v.shape}."
        )

    # Scale to a max-norm of 1; squared tiny entries underflow to 0.
    scale_u = float(np.max(np.abs(u), initial=0.0))
    scale_v = float(np.max(np.abs(v), initial=0.0))
    if scale_u == 0.0 or scale_v == 0.0:
        return 0.0

    u = u / scale_u
    v = v / scale_v
    norm = float(np.linalg.norm(u)) * float(np.linalg.norm(v))
    return float(np.clip(np.dot(u, v) / norm, -1.0, 1.0))
