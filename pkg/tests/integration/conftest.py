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

"""Fixtures for end-to-end pipeline tests."""
import pathlib
import shutil

import pytest

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture()
def smoke_dir(tmp_path):
    """A writable copy of the bundled 12-document corpus."""
    destination = tmp_path / "smoke"
    shutil.copytree(DATA_DIR / "smoke", destination)
    return destination


@pytest.fixture()
def smoke_config(smoke_dir):
    return smoke_dir / "config.yaml"
