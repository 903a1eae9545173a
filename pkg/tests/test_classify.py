# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import csv
import io
import json
from typing import Any

import pytest

from lenslab.classify import ClassificationReport
from lenslab.classify import ReportFormat
from lenslab.classify import classify_all
from lenslab.classify import classify_essential
from lenslab.classify import classify_even
from lenslab.classify import classify_null
from lenslab.classify import decide
from lenslab.classify import load_report
from lenslab.classify import render_report
from lenslab.classify import render_verdict
from lenslab.config import ConfigFile
from lenslab.exceptions import InconsistentVerdict
from lenslab.exceptions import InvalidParams
from lenslab.obstruct import ImportedFact
from lenslab.obstruct import Outcome
from lenslab.obstruct import Realization


@pytest.fixture
def bogus_config(default_config: ConfigFile) -> ConfigFile:
    config: dict[str, Any] = default_config.dict()
    config["realizations"] = {
        "bogus": {"k": 1, "m": 2, "n": ["p+4"], "primes": None, "citation": "none"}
    }
    return ConfigFile.parse_obj(config)


@pytest.mark.parametrize(
    "p,k,m,n,engine",
    [
        (7, 3, 2, 5, "linking_form"),
        (7, 3, 2, -5, "linking_form"),
        (7, 3, 0, 9, "linking_form"),
        (7, 3, 0, -9, "essential"),
        (7, 2, 1, -3, "linking_form"),
        (5, 1, 2, 9, "essential"),
        (5, 2, 3, 11, "essential"),
        (5, 2, 0, -4, "spin"),
        (13, 0, 1, -13, "imported_fact"),
        (5, 0, -1, -5, "null"),
    ],
)
def test_decide_obstructed(
    default_config: ConfigFile, p: int, k: int, m: int, n: int, engine: str
) -> None:
    verdict = decide(p, k, m, n, default_config)
    assert verdict.outcome == Outcome.OBSTRUCTED
    assert verdict.engine == engine


@pytest.mark.parametrize(
    "p,k,m,n,tag",
    [
        (5, 2, -1, 9, "band_p_plus_4"),
        (7, 2, 1, 3, "simple_knot"),
        (5, 0, 1, -5, "negative_l5"),
        (5, 0, 1, 5, "band_p"),
        (5, 1, 1, 4, "band_p_minus_1"),
        (5, 1, -1, 6, "band_p_plus_1"),
        (5, 1, 0, -1, "band_unknot"),
        (5, 2, 1, 1, "band_reverse"),
        (5, 2, 1, -1, "band_reverse"),
    ],
)
def test_decide_realized(
    default_config: ConfigFile, p: int, k: int, m: int, n: int, tag: str
) -> None:
    verdict = decide(p, k, m, n, default_config)
    assert verdict.outcome == Outcome.REALIZED
    assert verdict.engine == "realization"
    assert isinstance(verdict.witness, Realization)
    assert verdict.witness.tag == tag


def test_decide_negative_lens_allowed(default_config: ConfigFile) -> None:
    # L(5,1) -> L(-5,1) is realized; without the realization the imported fact is open
    config = ConfigFile.parse_obj(
        {**default_config.dict(), "realizations": {}}
    )
    verdict = decide(5, 0, 1, -5, config)
    assert verdict.outcome == Outcome.NOT_OBSTRUCTED
    assert isinstance(verdict.witness, ImportedFact)


def test_decide_outside_applicability_is_undetermined(default_config: ConfigFile) -> None:
    config = ConfigFile.parse_obj({**default_config.dict(), "realizations": {}})
    verdict = decide(7, 2, 1, 3, config)
    assert verdict.outcome == Outcome.UNDETERMINED
    assert verdict.engine == "essential"


@pytest.mark.parametrize(
    "p,k,m,n",
    [(5, 2, 3, 10), (5, 2, 3, 9), (5, 0, 0, 5), (5, 0, 1, 10), (4, 1, 1, 3), (5, 3, 1, 4)],
)
def test_decide_invalid(default_config: ConfigFile, p: int, k: int, m: int, n: int) -> None:
    with pytest.raises(InvalidParams):
        decide(p, k, m, n, default_config)


def test_realization_never_meets_obstruction(bogus_config: ConfigFile) -> None:
    with pytest.raises(InconsistentVerdict):
        decide(5, 1, 2, 9, bogus_config)
    with pytest.raises(InconsistentVerdict):
        classify_essential(5, 1, m_bound=3, config=bogus_config)


def test_classify_even(default_config: ConfigFile) -> None:
    assert classify_even(5, config=default_config) == {4, 6}
    assert classify_even(7, config=default_config) == {6, 8}


def test_classify_null(default_config: ConfigFile) -> None:
    assert classify_null(5, config=default_config) == {5, -5}
    assert classify_null(7, config=default_config) == {7}


def test_classify_essential_rows(default_config: ConfigFile) -> None:
    rows = classify_essential(5, 2, m_bound=3, config=default_config)
    assert [(row.m, row.n) for row in rows] == [
        (-3, -19),
        (-3, 19),
        (-1, -9),
        (-1, 9),
        (1, -1),
        (1, 1),
        (3, -11),
        (3, 11),
    ]
    assert all(row.k == 2 for row in rows)


@pytest.mark.parametrize("p,k", [(5, 0), (5, 3), (7, 4)])
def test_classify_essential_invalid(default_config: ConfigFile, p: int, k: int) -> None:
    with pytest.raises(InvalidParams):
        classify_essential(p, k, config=default_config)


@pytest.mark.parametrize("p", [1, 4, 9, -5])
def test_classify_invalid_p(default_config: ConfigFile, p: int) -> None:
    with pytest.raises(InvalidParams):
        classify_all(p, config=default_config)


@pytest.fixture
def small_report(default_config: ConfigFile) -> ClassificationReport:
    return classify_all(5, m_bound=2, config=default_config, threads=2)


def test_classify_all_partition(small_report: ClassificationReport) -> None:
    realized = set(small_report.realized)
    obstructed = set(small_report.obstructed)
    undetermined = set(small_report.undetermined)
    assert realized.isdisjoint(obstructed)
    assert realized.isdisjoint(undetermined)
    assert obstructed.isdisjoint(undetermined)
    assert realized | obstructed | undetermined == {row.n for row in small_report.rows}
    assert {1, -1, 4, 5, 6, 9, -5} <= realized
    assert small_report.not_obstructed == tuple(sorted(realized | undetermined))


def test_rows_are_sorted(small_report: ClassificationReport) -> None:
    keys = [(row.k, row.m, row.n) for row in small_report.rows]
    assert keys == sorted(keys)


def test_report_json_round_trip(small_report: ClassificationReport) -> None:
    text = render_report(small_report)
    assert json.loads(text)["schema"] == "1"
    assert load_report(text) == small_report


def test_report_csv(small_report: ClassificationReport) -> None:
    rows = list(csv.reader(io.StringIO(render_report(small_report, ReportFormat.csv))))
    assert rows[0] == ["schema", "p", "k", "m", "n", "verdict", "engine", "witness"]
    assert len(rows) == len(small_report.rows) + 1
    assert all(row[0] == "1" and row[1] == "5" for row in rows[1:])
    json.loads(rows[1][7])


def test_report_text(small_report: ClassificationReport) -> None:
    text = render_report(small_report, ReportFormat.text)
    lines = text.splitlines()
    assert lines[0].split() == ["k", "m", "n", "verdict", "engine"]
    assert "p=5 m_bound=2" in lines
    assert any(line.startswith("realized: ") for line in lines)


def test_render_verdict_fractions(default_config: ConfigFile) -> None:
    verdict = decide(5, 2, 3, -11, default_config)
    assert json.loads(render_verdict(verdict)) == {
        "outcome": "obstructed",
        "engine": "essential",
        "witness": {"kind": "non_integral", "name": "V", "value": "3/2"},
    }
