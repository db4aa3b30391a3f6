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

"""Run configuration.

A run is configured by a single document (JSON, or any YAML) such as::

    {
      "paths": {"corpus": "corpus", "format": "jsonl",
                "embeddings": "vectors.txt", "output_dir": "out"},
      "signals": {"enabled": ["ext", "rule", "word_sim", "topic_sent",
                              "ref_sent", "sent_sent", "qa"]},
      "fusion": {"weights": {"ext": 1, "rule": 1}, "drop": [], "keep": []},
      "train": {"learning_rate": 0.1, "epochs": 20, "seed": 0},
      "mode": "one_sentence",
      "max_topics": 5,
      "max_sentences": 50
    }

Relative paths are resolved against the directory of the config file.
"""
import dataclasses
import pathlib
from typing import Any, Dict, Iterable, List, Optional, Tuple

import yaml

from weaksum import errors
from weaksum.corpus.ingest import DEFAULT_MAX_SENTENCES, CorpusFormat
from weaksum.corpus.text import DEFAULT_ABBREVIATIONS
from weaksum.corpus.topics import DEFAULT_MAX_TOPICS
from weaksum.fusion import FusionConfig, expand_names, parse_name_list
from weaksum.scorer import BudgetMode, ScorerError, TrainConfig
from weaksum.signals import SIGNAL_NAMES

_PATH_KEYS = (
    "corpus",
    "embeddings",
    "sentence_vectors",
    "entities",
    "qa_answers",
)


@dataclasses.dataclass(frozen=True)
class PathsConfig:
    """Input files and the output directory."""

    corpus: Optional[pathlib.Path] = None
    corpus_format: CorpusFormat = CorpusFormat.JSONL
    embeddings: Optional[pathlib.Path] = None
    sentence_vectors: Optional[pathlib.Path] = None
    entities: Optional[pathlib.Path] = None
    qa_answers: Optional[pathlib.Path] = None
    output_dir: pathlib.Path = pathlib.Path("out")


@dataclasses.dataclass(frozen=True)
class SignalsConfig:
    """Which signals to compute and how labels are aligned."""

    enabled: Tuple[str, ...] = SIGNAL_NAMES
    ext_max_select: int = 3
    qa_max_select: int = 1


@dataclasses.dataclass(frozen=True)
class FusionSettings:
    """Fusion weights and the ablated signals or groups.

    ``keep``, when set, removes every signal outside the named ones.
    """

    weights: Optional[Dict[str, float]] = None
    drop: Tuple[str, ...] = ()
    keep: Tuple[str, ...] = ()


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Everything a pipeline run depends on."""

    paths: PathsConfig = PathsConfig()
    signals: SignalsConfig = SignalsConfig()
    fusion: FusionSettings = FusionSettings()
    train: TrainConfig = TrainConfig()
    mode: BudgetMode = BudgetMode.ONE_SENTENCE
    max_topics: int = DEFAULT_MAX_TOPICS
    max_sentences: int = DEFAULT_MAX_SENTENCES
    abbreviations: Tuple[str, ...] = tuple(sorted(DEFAULT_ABBREVIATIONS))
    workers: int = 1

    def fusion_config(self) -> FusionConfig:
        """Fusion weights before ablation (equal over enabled signals)."""
        if self.fusion.weights is None:
            return FusionConfig.equal(self.signals.enabled)
        return FusionConfig(weights=dict(self.fusion.weights))

    def marshal(self) -> Dict[str, Any]:
        """Create a JSON-serializable dictionary of the resolved config."""
        paths = {
            key: str(getattr(self.paths, key)) if getattr(self.paths, key) else None
            for key in _PATH_KEYS
        }
        paths["format"] = self.paths.corpus_format.value
        paths["output_dir"] = str(self.paths.output_dir)

        return {
            "paths": paths,
            "signals": {
                "enabled": list(self.signals.enabled),
                "ext_max_select": self.signals.ext_max_select,
                "qa_max_select": self.signals.qa_max_select,
            },
            "fusion": {
                "weights": dict(self.fusion_config().weights),
                "drop": list(self.fusion.drop),
                "keep": list(self.fusion.keep),
            },
            "train": dataclasses.asdict(self.train),
            "mode": self.mode.value,
            "max_topics": self.max_topics,
            "max_sentences": self.max_sentences,
            "abbreviations": list(self.abbreviations),
            "workers": self.workers,
        }

    def require(self, *keys: str) -> None:
        """Check that the named paths are configured.

        :raises ConfigError: If one of them is not set.
        """
        missing = [key for key in keys if getattr(self.paths, key) is None]
        if missing:
            raise errors.ConfigError(
                brief=f"Missing required paths: {', '.join(missing)}.",
                resolution="Set them under 'paths' in the run configuration.",
            )

    def validate(self) -> None:
        """Check that every configured input path exists.

        :raises ConfigError: If a path does not exist.
        """
        for key in _PATH_KEYS:
            path = getattr(self.paths, key)
            if path is not None and not path.exists():
                raise errors.ConfigError(
                    brief=f"Configured path {key!r} does not exist: {str(path)!r}.",
                    resolution="Fix the path in the run configuration.",
                )


def _section(data: Dict[str, Any], key: str, allowed: Iterable[str]) -> Dict[str, Any]:
    section = data.get(key) or {}
    if not isinstance(section, dict):
        raise errors.ConfigError(brief=f"Config section {key!r} must be a mapping.")

    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise errors.ConfigError(
            brief=f"Unknown keys in config section {key!r}: {', '.join(unknown)}."
        )
    return section


def _path(value: Any, base: pathlib.Path) -> Optional[pathlib.Path]:
    if value is None:
        return None
    path = pathlib.Path(str(value)).expanduser()
    return path if path.is_absolute() else base / path


def _names(value: Any, key: str) -> Tuple[str, ...]:
    if isinstance(value, str):
        return tuple(parse_name_list(value))
    if not isinstance(value, list):
        raise errors.ConfigError(brief=f"Config key {key!r} must be a list of names.")
    return tuple(str(item).strip().lower() for item in value)


def _signal_names(names: Tuple[str, ...]) -> Tuple[str, ...]:
    try:
        expand_names(names)
    except errors.FusionError as error:
        raise errors.ConfigError(
            brief=error.brief, resolution=error.resolution
        ) from error
    return names


def _int(value: Any, key: str, minimum: int) -> int:
    try:
        number = int(value)
    except (TypeError, ValueError) as error:
        raise errors.ConfigError(
            brief=f"Config key {key!r} must be an integer."
        ) from error
    if number < minimum or number != float(value):
        raise errors.ConfigError(
            brief=f"Config key {key!r} must be an integer >= {minimum}."
        )
    return number


def _float(value: Any, key: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError) as error:
        raise errors.ConfigError(
            brief=f"Config key {key!r} must be a number."
        ) from error


def _parse(data: Dict[str, Any], base: pathlib.Path) -> RunConfig:
    unknown = sorted(
        set(data)
        - {
            "paths",
            "signals",
            "fusion",
            "train",
            "mode",
            "max_topics",
            "max_sentences",
            "abbreviations",
            "workers",
        }
    )
    if unknown:
        raise errors.ConfigError(brief=f"Unknown config keys: {', '.join(unknown)}.")

    raw_paths = _section(data, "paths", (*_PATH_KEYS, "format", "output_dir"))
    raw_signals = _section(
        data, "signals", ("enabled", "ext_max_select", "qa_max_select")
    )
    raw_fusion = _section(data, "fusion", ("weights", "drop", "keep"))
    raw_train = _section(
        data, "train", [field.name for field in dataclasses.fields(TrainConfig)]
    )

    try:
        corpus_format = CorpusFormat(raw_paths.get("format", CorpusFormat.JSONL.value))
        mode = BudgetMode(data.get("mode", BudgetMode.ONE_SENTENCE.value))
    except ValueError as error:
        raise errors.ConfigError(brief=str(error)) from error

    paths = PathsConfig(
        corpus_format=corpus_format,
        output_dir=_path(raw_paths.get("output_dir", "out"), base) or base / "out",
        **{key: _path(raw_paths.get(key), base) for key in _PATH_KEYS},
    )

    enabled = _names(raw_signals.get("enabled", list(SIGNAL_NAMES)), "signals.enabled")
    unknown_signals = sorted(set(enabled) - set(SIGNAL_NAMES))
    if unknown_signals:
        raise errors.ConfigError(
            brief=f"Unknown signals enabled: {', '.join(unknown_signals)}.",
            resolution=f"Known signals: {', '.join(SIGNAL_NAMES)}.",
        )
    signals = SignalsConfig(
        enabled=tuple(name for name in SIGNAL_NAMES if name in enabled),
        ext_max_select=_int(raw_signals.get("ext_max_select", 3), "ext_max_select", 1),
        qa_max_select=_int(raw_signals.get("qa_max_select", 1), "qa_max_select", 1),
    )

    weights = raw_fusion.get("weights")
    if weights is not None:
        if not isinstance(weights, dict):
            raise errors.ConfigError(
                brief="Config key 'fusion.weights' must be a mapping."
            )
        weights = {
            str(name): _float(value, f"weights.{name}")
            for name, value in weights.items()
        }
    fusion = FusionSettings(
        weights=weights,
        drop=_signal_names(_names(raw_fusion.get("drop", []), "fusion.drop")),
        keep=_signal_names(_names(raw_fusion.get("keep", []), "fusion.keep")),
    )

    try:
        train = TrainConfig(
            learning_rate=_float(raw_train.get("learning_rate", 0.1), "learning_rate"),
            epochs=_int(raw_train.get("epochs", 20), "epochs", 0),
            l2=_float(raw_train.get("l2", 1e-4), "l2"),
            seed=_int(raw_train.get("seed", 0), "seed", 0),
            clamp_eps=_float(raw_train.get("clamp_eps", 1e-7), "clamp_eps"),
            batch_size=_int(raw_train.get("batch_size", 32), "batch_size", 1),
        )
    except ScorerError as error:
        raise errors.ConfigError(
            brief=f"Invalid train config: {error.brief}"
        ) from error

    config = RunConfig(
        paths=paths,
        signals=signals,
        fusion=fusion,
        train=train,
        mode=mode,
        max_topics=_int(data.get("max_topics", DEFAULT_MAX_TOPICS), "max_topics", 1),
        max_sentences=_int(
            data.get("max_sentences", DEFAULT_MAX_SENTENCES), "max_sentences", 1
        ),
        abbreviations=_names(
            data.get("abbreviations", sorted(DEFAULT_ABBREVIATIONS)), "abbreviations"
        ),
        workers=_int(data.get("workers", 1), "workers", 1),
    )

    try:
        config.fusion_config()
    except errors.FusionError as error:
        raise errors.ConfigError(brief=error.brief) from error

    return config


def load_config(path: Optional[pathlib.Path] = None) -> RunConfig:
    """Load and validate a run configuration.

    :param path: Config file; defaults apply when None.

    :raises ConfigError: If the file is unreadable or invalid.
    """
    if path is None:
        return _parse({}, pathlib.Path.cwd())

    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as error:
        raise errors.ConfigError(
            brief=f"Failed to load config {str(path)!r}.", details=str(error)
        ) from error

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise errors.ConfigError(brief=f"Config {str(path)!r} must be a mapping.")

    return _parse(data, path.resolve().parent)


def apply_overrides(
    config: RunConfig,
    *,
    output_dir: Optional[pathlib.Path] = None,
    seed: Optional[int] = None,
    mode: Optional[str] = None,
    drop: Optional[List[str]] = None,
    keep: Optional[List[str]] = None,
    workers: Optional[int] = None,
) -> RunConfig:
    """Return config with command-line overrides applied.

    :raises ConfigError: On invalid values.
    """
    if output_dir is not None:
        config = dataclasses.replace(
            config, paths=dataclasses.replace(config.paths, output_dir=output_dir)
        )

    if seed is not None:
        config = dataclasses.replace(
            config, train=dataclasses.replace(config.train, seed=seed)
        )

    if mode is not None:
        try:
            config = dataclasses.replace(config, mode=BudgetMode(mode))
        except ValueError as error:
            raise errors.ConfigError(brief=str(error)) from error

    if drop is not None:
        config = dataclasses.replace(
            config,
            fusion=dataclasses.replace(config.fusion, drop=_signal_names(tuple(drop))),
        )

    if keep is not None:
        config = dataclasses.replace(
            config,
            fusion=dataclasses.replace(config.fusion, keep=_signal_names(tuple(keep))),
        )

    if workers is not None:
        if workers < 1:
            raise errors.ConfigError(brief="--workers must be at least 1.")
        config = dataclasses.replace(config, workers=workers)

    return config
