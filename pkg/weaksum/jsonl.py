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

"""JSON lines helpers shared by every pipeline stage."""
import json
import logging
import os
import pathlib
import tempfile
from typing import Any, Iterable, Iterator, Tuple

from weaksum import errors

logger = logging.getLogger(__name__)


def dumps(obj: Any) -> str:
    """Serialize obj with a stable key order and separators."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(", ", ": "))


def read_jsonl(path: pathlib.Path) -> Iterator[Tuple[int, Any]]:
    """Yield (line_number, object) for each non-blank line of path.

    :param path: JSON lines file to read.

    :raises DataError: If the file cannot be read or a line is not JSON.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue

                try:
                    yield line_number, json.loads(line)
                except json.JSONDecodeError as error:
                    raise errors.DataError(
                        brief=f"Failed to parse JSON lines file {str(path)!r}.",
                        details=errors.details_from_line(
                            path=path,
                            line_number=line_number,
                            line=line.rstrip("\n"),
                            reason=error.msg,
                        ),
                    ) from error
    except OSError as error:
        raise errors.DataError(
            brief=f"Failed to read {str(path)!r}.",
            details=str(error),
        ) from error


def write_text_atomic(path: pathlib.Path, text: str) -> None:
    """Write text to path through a temporary file and a rename.

    :param path: Destination file.  Parent directories are created.
    :param text: Content to write.
    """
    path.parent.mkdir(parents=True, exist_ok=True)

    with tempfile.NamedTemporaryFile(
        "w",
        encoding="utf-8",
        dir=path.parent,
        prefix=f".{path.name}.",
        suffix=".tmp",
        delete=False,
    ) as handle:
        handle.write(text)
        temp_name = handle.name

    try:
        os.replace(temp_name, path)
    except OSError:
        os.unlink(temp_name)
        raise

    logger.debug("Wrote %s", path)


def write_jsonl_atomic(path: pathlib.Path, records: Iterable[Any]) -> int:
    """Write records as JSON lines, atomically.

    :returns: Number of records written.
    """
    lines = [dumps(record) for record in records]
    write_text_atomic(path, "".join(line + "\n" for line in lines))
    return len(lines)
