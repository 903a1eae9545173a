# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from pathlib import Path
from textwrap import dedent

import pytest
import structlog

from lenslab.app import configure_logging
from lenslab.app import setup
from lenslab.config import Settings
from lenslab.exceptions import InvalidParams


def test_configure_logging_writes_to_stderr(capsys: pytest.CaptureFixture[str]) -> None:
    configure_logging("info")
    structlog.stdlib.get_logger().info("Hello", p=5)
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "Hello" in captured.err
    assert "p=5" in captured.err


def test_configure_logging_filters(capsys: pytest.CaptureFixture[str]) -> None:
    configure_logging("WARNING")
    structlog.stdlib.get_logger().debug("Hidden")
    assert "Hidden" not in capsys.readouterr().err


def test_configure_logging_unknown_level() -> None:
    with pytest.raises(InvalidParams):
        configure_logging("LOUD")


def test_setup_loads_config_file(config_file: Path) -> None:
    config_file.write_text(
        dedent(
            """
            realizations: {}
            imported_facts:
              negative_lens:
                allowed: [1]
                citation: "only the trivial case"
            """
        )
    )
    config = setup(Settings())
    assert list(config.realizations.items()) == []
    assert config.imported_facts.negative_lens.allowed == [1]
