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

"""Weaksum errors."""
import dataclasses
import pathlib
from typing import Iterable, Optional, Tuple, Union


def details_from_line(
    *,
    path: Union[str, pathlib.Path],
    line_number: int,
    line: Optional[str] = None,
    reason: Optional[str] = None,
) -> str:
    """Create consistent details for an error located on a line of a file.

    The offending line, if provided, is included using its object
    representation and shortened to 80 characters.

    :param path: File that failed to parse.
    :param line_number: 1-based line number.
    :param line: Optional offending line content.
    :param reason: Optional parser message.

    :returns: Details string.
    """
    details = [
        f"* File: {str(path)!r}",
        f"* Line: {line_number}",
    ]

    if line is not None:
        shown = line if len(line) <= 80 else line[:77] + "..."
        details.append(f"* Content: {shown!r}")

    if reason:
        details.append(f"* Reason: {reason}")

    return "\n".join(details)


def details_from_missing_keys(keys: Iterable[Tuple[str, ...]]) -> str:
    """Create consistent details listing missing (id, ...) keys.

    :param keys: Missing keys, each a tuple of strings.

    :returns: Details string.
    """
    lines = [f"* Missing key: {key!r}" for key in sorted(keys)]
    return "\n".join(lines)


@dataclasses.dataclass
class WeaksumError(Exception):
    """Unexpected error.

    :param brief: Brief description of error.
    :param details: Detailed information.
    :param resolution: Recommendation, if any.
    """

    brief: str
    details: Optional[str] = None
    resolution: Optional[str] = None

    def __str__(self) -> str:
        parts = [self.brief]

        if self.details:
            parts.append(self.details)

        if self.resolution:
            parts.append(self.resolution)

        return "\n".join(parts)


class ConfigError(WeaksumError):
    """Invalid usage or run configuration."""


class DataError(WeaksumError):
    """Invalid input data or numerical failure."""


class AlignmentError(DataError):
    """Extractive label alignment failed."""


class SignalError(DataError):
    """Supervision signal could not be computed."""


class FusionError(DataError):
    """Supervision signals could not be fused."""


class PipelineError(DataError):
    """Stage input files are missing or inconsistent."""
