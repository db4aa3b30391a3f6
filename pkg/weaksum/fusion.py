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

"""Fuse supervision signals into soft labels.

The fused target of sentence i is the weighted sum of the present signals,
with weights restricted to the present signals and renormalized to sum to 1.
"""
import dataclasses
import logging
import pathlib
import re
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from weaksum import errors, jsonl
from weaksum.signals import SIGNAL_NAMES, SignalMatrix

logger = logging.getLogger(__name__)

SIGNAL_GROUPS: Mapping[str, Tuple[str, ...]] = {
    "ext-label": ("ext",),
    "rule-based": ("rule",),
    "sem-sim": ("word_sim", "topic_sent", "ref_sent", "sent_sent"),
    "qa": ("qa",),
}


def expand_names(names: Iterable[str]) -> FrozenSet[str]:
    """Expand signal and group names into signal names.

    :raises FusionError: On an unknown name.
    """
    expanded = set()
    for name in names:
        key = name.strip().lower()
        if key in SIGNAL_NAMES:
            expanded.add(key)
        elif key in SIGNAL_GROUPS:
            expanded.update(SIGNAL_GROUPS[key])
        else:
            raise errors.FusionError(
                brief=f"Unknown signal or group {name!r}.",
                resolution="Use one of: "
                + ", ".join([*SIGNAL_NAMES, *SIGNAL_GROUPS])
                + ".",
            )
    return frozenset(expanded)


def parse_name_list(value: str) -> List[str]:
    """Split a comma separated name list, dropping blanks and duplicates."""
    names: List[str] = []
    for part in value.split(","):
        name = part.strip().lower()
        if name and name not in names:
            names.append(name)
    return names


def system_name(dropped: Sequence[str]) -> str:
    """Name of an ablation variant, e.g. "all" or "all−{ext,qa}"."""
    if not dropped:
        return "all"
    return "all−{" + ",".join(dropped) + "}"


def system_slug(name: str) -> str:
    """Filesystem-safe form of a system name."""
    slug = name.replace("−", "-minus-")
    slug = re.sub(r"[^A-Za-z0-9_]+", "-", slug)
    return slug.strip("-").lower() or "system"


@dataclasses.dataclass(frozen=True)
class FusionConfig:
    """Non-negative weight per signal name."""

    weights: Mapping[str, float]

    def __post_init__(self) -> None:
        for name, weight in self.weights.items():
            if name not in SIGNAL_NAMES:
                raise errors.FusionError(brief=f"Unknown signal {name!r} in weights.")
            if not weight >= 0.0:
                raise errors.FusionError(
                    brief=f"Weight of {name!r} is {weight!r}; weights must be >= 0."
                )

    @classmethod
    def equal(cls, names: Optional[Iterable[str]] = None) -> "FusionConfig":
        """Equal weights over names (all signals by default)."""
        selected = SIGNAL_NAMES if names is None else tuple(names)
        return cls(weights={name: 1.0 for name in SIGNAL_NAMES if name in selected})

    @property
    def active(self) -> List[str]:
        """Signals with positive weight, in canonical order."""
        return [name for name in SIGNAL_NAMES if self.weights.get(name, 0.0) > 0.0]


@dataclasses.dataclass(frozen=True)
class FusedLabels:
    """Soft targets for one (document, topic) instance."""

    doc_id: str
    topic_text: str
    targets: Tuple[float, ...]

    @property
    def key(self) -> Tuple[str, str]:
        """Instance key used to join stage files."""
        return (self.doc_id, self.topic_text)

    def marshal(self) -> Dict:
        """Create a JSON-serializable dictionary."""
        return {
            "id": self.doc_id,
            "topic": self.topic_text,
            "targets": list(self.targets),
        }

    @classmethod
    def unmarshal(cls, data: Dict) -> "FusedLabels":
        """Create FusedLabels from marshalled data."""
        return cls(
            doc_id=data["id"],
            topic_text=data["topic"],
            targets=tuple(float(value) for value in data["targets"]),
        )


def ablate(config: FusionConfig, drop: Iterable[str]) -> FusionConfig:
    """Zero the weights of dropped signals (or groups)."""
    dropped = expand_names(drop)
    return FusionConfig(
        weights={
            name: 0.0 if name in dropped else weight
            for name, weight in config.weights.items()
        }
    )


def keep(config: FusionConfig, names: Iterable[str]) -> FusionConfig:
    """Zero the weights of every signal not named (or in a named group)."""
    kept = expand_names(names)
    return FusionConfig(
        weights={
            name: weight if name in kept else 0.0
            for name, weight in config.weights.items()
        }
    )


def fuse(matrix: SignalMatrix, config: FusionConfig) -> FusedLabels:
    """Fuse the present signals of matrix into soft targets.

    :raises FusionError: If no present signal has a positive weight.
    """
    present = [name for name in matrix.present if config.weights.get(name, 0.0) > 0.0]
    if not present:
        raise errors.FusionError(
            brief=f"No weighted signal present for {matrix.key!r}.",
            details=f"* Present signals: {', '.join(matrix.present)}\n"
            f"* Weighted signals: {', '.join(config.active) or 'none'}",
            resolution="Drop fewer signals.",
        )

    weights = np.array([config.weights[name] for name in present], dtype=np.float64)
    weights = weights / weights.sum()
    rows = np.array([matrix.values[name] for name in present], dtype=np.float64)
    targets = np.clip(weights @ rows, 0.0, 1.0)

    return FusedLabels(
        doc_id=matrix.doc_id,
        topic_text=matrix.topic_text,
        targets=tuple(float(value) for value in targets),
    )


def write_labels(path: pathlib.Path, labels: Iterable[FusedLabels]) -> int:
    """Write fused labels sorted by (id, topic), atomically."""
    ordered = sorted(labels, key=lambda item: item.key)
    return jsonl.write_jsonl_atomic(path, (item.marshal() for item in ordered))


def read_labels(path: pathlib.Path) -> Dict[Tuple[str, str], FusedLabels]:
    """Read fused labels keyed by (id, topic).

    :raises FusionError: If a record is malformed.
    """
    labels = {}
    for line_number, record in jsonl.read_jsonl(path):
        try:
            item = FusedLabels.unmarshal(record)
        except (KeyError, TypeError, ValueError) as error:
            raise errors.FusionError(
                brief=f"Malformed label file {str(path)!r}.",
                details=errors.details_from_line(
                    path=path, line_number=line_number, reason=repr(error)
                ),
            ) from error
        labels[item.key] = item
    return labels
