# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from pathlib import Path

import pytest
from pytest import MonkeyPatch

from lenslab.config import ConfigFile
from lenslab.config import Settings
from lenslab.config import get_config_file
from lenslab.plumbing import GraphFamily
from lenslab.plumbing import PlumbingGraph
from lenslab.plumbing import build_family_graph
from lenslab.plumbing import graph_from_weights


@pytest.fixture
def config_file(tmp_path: Path, monkeypatch: MonkeyPatch) -> Path:
    file = tmp_path.joinpath("lenslab.config.yaml")
    file.touch()
    monkeypatch.setenv("LENSLAB_CONFIG_FILE", str(file))
    return file


@pytest.fixture
def default_config() -> ConfigFile:
    return get_config_file(Settings().config_file)


@pytest.fixture
def two_chain() -> PlumbingGraph:
    """Two (-2)-vertices joined by an edge; the boundary is L(3, 1)."""
    return graph_from_weights([-2, -2], [(0, 1)])


@pytest.fixture
def star_5_2_3() -> PlumbingGraph:
    """Star graph of (p, k, m) = (5, 2, 3); the boundary is L(11, 3)."""
    return build_family_graph(GraphFamily.star, 5, 2, 3)
