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

import dataclasses
import json
import pathlib
import textwrap

import pytest

from weaksum import errors
from weaksum.config import RunConfig, TrainConfig, apply_overrides, load_config
from weaksum.corpus import CorpusFormat
from weaksum.scorer import BudgetMode
from weaksum.signals import SIGNAL_NAMES


@pytest.fixture()
def config_dir(tmp_path):
    (tmp_path / "corpus").mkdir()
    (tmp_path / "vectors.txt").write_text("a 1 0\n")
    return tmp_path


def write_config(directory: pathlib.Path, data) -> pathlib.Path:
    path = directory / "config.json"
    path.write_text(json.dumps(data))
    return path


def test_defaults():
    config = load_config()

    assert config.signals.enabled == SIGNAL_NAMES
    assert config.mode == BudgetMode.ONE_SENTENCE
    assert config.train == TrainConfig()
    assert config.max_topics == 5
    assert config.workers == 1
    assert config.fusion_config().weights == {name: 1.0 for name in SIGNAL_NAMES}


def test_load_json_resolves_relative_paths(config_dir):
    path = write_config(
        config_dir,
        {
            "paths": {"corpus": "corpus", "embeddings": "vectors.txt"},
            "signals": {"enabled": ["rule", "ext"]},
            "mode": "twenty_words",
        },
    )

    config = load_config(path)

    assert config.paths.corpus == config_dir / "corpus"
    assert config.paths.embeddings == config_dir / "vectors.txt"
    assert config.paths.output_dir == config_dir / "out"
    assert config.paths.corpus_format == CorpusFormat.JSONL
    assert config.signals.enabled == ("ext", "rule")
    assert config.mode == BudgetMode.TWENTY_WORDS
    assert config.fusion_config().weights == {"ext": 1.0, "rule": 1.0}
    config.validate()


def test_load_yaml(config_dir):
    path = config_dir / "config.yaml"
    path.write_text(
        textwrap.dedent(
            """            paths:
              corpus: corpus
              format: stories
            train:
              learning_rate: 0.5
              l2: 1e-4
              epochs: 3
            fusion:
              weights: {rule: 2, qa: 0.5}
              drop: sem-sim, qa
            """
        )
    )

    config = load_config(path)

    assert config.paths.corpus_format == CorpusFormat.STORIES
    assert config.train == TrainConfig(learning_rate=0.5, l2=1e-4, epochs=3)
    assert config.fusion_config().weights == {"rule": 2.0, "qa": 0.5}
    assert config.fusion.drop == ("sem-sim", "qa")


def test_empty_file(config_dir):
    path = config_dir / "config.json"
    path.write_text("")

    config = load_config(path)

    assert config == dataclasses.replace(
        RunConfig(),
        paths=dataclasses.replace(RunConfig().paths, output_dir=config_dir / "out"),
    )


@pytest.mark.parametrize(
    "data,brief",
    [
        ({"bogus": 1}, "Unknown config keys: bogus."),
        ({"paths": {"nope": "x"}}, "Unknown keys in config section 'paths': nope."),
        ({"paths": ["x"]}, "Config section 'paths' must be a mapping."),
        (
            {"signals": {"enabled": ["rule", "magic"]}},
            "Unknown signals enabled: magic.",
        ),
        ({"max_topics": 0}, "Config key 'max_topics' must be an integer >= 1."),
        ({"workers": "many"}, "Config key 'workers' must be an integer."),
        ({"train": {"l2": "lots"}}, "Config key 'l2' must be a number."),
        (
            {"train": {"learning_rate": -1}},
            "Invalid train config: learning_rate must be > 0.",
        ),
        (
            {"fusion": {"weights": {"rule": -1}}},
            "Weight of 'rule' is -1.0; weights must be >= 0.",
        ),
        ({"fusion": {"drop": "ext, magic"}}, "Unknown signal or group 'magic'."),
        ({"fusion": {"keep": ["magic"]}}, "Unknown signal or group 'magic'."),
        (
            {"fusion": {"weights": ["rule"]}},
            "Config key 'fusion.weights' must be a mapping.",
        ),
    ],
)
def test_invalid_config(config_dir, data, brief):
    path = write_config(config_dir, data)

    with pytest.raises(errors.ConfigError) as exc_info:
        load_config(path)

    assert exc_info.value.brief == brief


def test_invalid_mode(config_dir):
    path = write_config(config_dir, {"mode": "three_words"})

    with pytest.raises(errors.ConfigError):
        load_config(path)


def test_not_a_mapping(config_dir):
    path = config_dir / "config.json"
    path.write_text("[1, 2]")

    with pytest.raises(errors.ConfigError) as exc_info:
        load_config(path)

    assert exc_info.value == errors.ConfigError(
        brief=f"Config {str(path)!r} must be a mapping."
    )


def test_unreadable_file(tmp_path):
    with pytest.raises(errors.ConfigError) as exc_info:
        load_config(tmp_path / "missing.json")

    assert exc_info.value.brief.startswith("Failed to load config")


def test_validate_missing_path(config_dir):
    path = write_config(config_dir, {"paths": {"embeddings": "nowhere.txt"}})
    config = load_config(path)

    with pytest.raises(errors.ConfigError) as exc_info:
        config.validate()

    assert exc_info.value == errors.ConfigError(
        brief=f"Configured path 'embeddings' does not exist: "
        f"{str(config_dir / 'nowhere.txt')!r}.",
        resolution="Fix the path in the run configuration.",
    )


def test_require():
    config = load_config()

    with pytest.raises(errors.ConfigError) as exc_info:
        config.require("corpus", "embeddings")

    assert exc_info.value.brief == "Missing required paths: corpus, embeddings."


def test_apply_overrides(tmp_path):
    config = apply_overrides(
        load_config(),
        output_dir=tmp_path,
        seed=7,
        mode="twenty_words",
        drop=["ext", "qa"],
        workers=4,
    )

    assert config.paths.output_dir == tmp_path
    assert config.train.seed == 7
    assert config.mode == BudgetMode.TWENTY_WORDS
    assert config.fusion.drop == ("ext", "qa")
    assert config.workers == 4


def test_apply_overrides_keeps_unset_values():
    config = load_config()

    assert apply_overrides(config) == config


def test_apply_overrides_invalid_workers():
    with pytest.raises(errors.ConfigError):
        apply_overrides(load_config(), workers=0)


def test_keep(config_dir):
    path = write_config(config_dir, {"fusion": {"keep": "ext, Rule-Based"}})

    config = apply_overrides(load_config(path))

    assert config.fusion.keep == ("ext", "rule-based")
    assert config.marshal()["fusion"]["keep"] == ["ext", "rule-based"]
    assert apply_overrides(config, keep=["qa"]).fusion.keep == ("qa",)


def test_apply_overrides_unknown_drop():
    with pytest.raises(errors.ConfigError) as exc_info:
        apply_overrides(load_config(), drop=["rule-based", "magic"])

    assert exc_info.value.brief == "Unknown signal or group 'magic'."


def test_marshal(config_dir):
    path = write_config(config_dir, {"paths": {"corpus": "corpus"}})

    data = load_config(path).marshal()

    assert data["paths"]["corpus"] == str(config_dir / "corpus")
    assert data["paths"]["embeddings"] is None
    assert data["paths"]["format"] == "jsonl"
    assert data["fusion"]["weights"] == {name: 1.0 for name in SIGNAL_NAMES}
    assert data["train"]["seed"] == 0
    assert data["mode"] == "one_sentence"
    json.dumps(data)
