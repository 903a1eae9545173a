# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Sweeps over (k, m) assembling the engines into a classification of L(n, 1).

Every row is one candidate surgery (k, m) -> L(n, 1). Engines run first; the
realization table is overlaid afterwards and must never meet an obstructed row.
"""
import csv
import io
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from fractions import Fraction
from functools import partial
from typing import Any
from typing import Literal

import structlog
from more_itertools import map_reduce
from pydantic import BaseModel
from pydantic import Field
from pydantic.json import pydantic_encoder

from lenslab.config import ConfigFile
from lenslab.config import Settings
from lenslab.config import get_config_file
from lenslab.exactlat import format_rational
from lenslab.exceptions import InconsistentVerdict
from lenslab.exceptions import InvalidParams
from lenslab.obstruct import Hypothesis
from lenslab.obstruct import NullOrientation
from lenslab.obstruct import Outcome
from lenslab.obstruct import Realization
from lenslab.obstruct import Verdict
from lenslab.obstruct import essential_case
from lenslab.obstruct import linking_form_case
from lenslab.obstruct import negative_lens_verdict
from lenslab.obstruct import null_case
from lenslab.obstruct import spin_deltad_check
from lenslab.surgery import SurgeryProblem

logger = structlog.stdlib.get_logger()

SCHEMA_VERSION = "1"


class ReportFormat(str, Enum):
    json = "json"
    csv = "csv"
    text = "text"


class ReportRow(BaseModel):
    n: int
    k: int
    m: int
    verdict: Verdict

    class Config:
        frozen = True


class ClassificationReport(BaseModel):
    schema_version: Literal["1"] = Field(SCHEMA_VERSION, alias="schema")
    p: int
    m_bound: int
    rows: tuple[ReportRow, ...]
    realized: tuple[int, ...]
    obstructed: tuple[int, ...]
    undetermined: tuple[int, ...]

    class Config:
        frozen = True
        allow_population_by_field_name = True
        json_encoders = {Fraction: format_rational}

    @property
    def not_obstructed(self) -> tuple[int, ...]:
        return tuple(sorted(self.realized + self.undetermined))


Task = Callable[[], list[ReportRow]]


def _default_config() -> ConfigFile:
    return get_config_file(Settings().config_file)


def _overlay(
    config: ConfigFile, p: int, k: int, m: int, n: int, verdict: Verdict
) -> ReportRow:
    tag = config.realizations.match(p, k, m, n)
    if tag is not None:
        if verdict.obstructed:
            raise InconsistentVerdict(
                f"{verdict.engine} obstructs ({p}, {k}, {m}) -> L({n},1), realized by {tag}"
            )
        entry = config.realizations.__root__[tag]
        verdict = Verdict(
            outcome=Outcome.REALIZED,
            engine="realization",
            witness=Realization(tag=tag, citation=entry.citation),
        )
    return ReportRow(n=n, k=k, m=m, verdict=verdict)


def _run(tasks: list[Task], threads: int) -> list[ReportRow]:
    with ThreadPoolExecutor(max_workers=threads) as executor:
        chunks = list(executor.map(lambda task: task(), tasks))
    rows = [row for chunk in chunks for row in chunk]
    return sorted(rows, key=lambda row: (row.k, row.m, row.n))


def _check_p(p: int) -> None:
    SurgeryProblem.of(p, 0, 0)


def _even_rows(p: int, m_bound: int, config: ConfigFile, threads: int) -> list[ReportRow]:
    def evaluate(k: int, m: int) -> list[ReportRow]:
        discriminant = p * m - k**2
        return [
            _overlay(config, p, k, m, n, spin_deltad_check(p, n))
            for n in (discriminant, -discriminant)
        ]

    tasks: list[Task] = [
        partial(evaluate, k, m)
        for k in range((p - 1) // 2 + 1)
        for m in range(-m_bound, m_bound + 1)
        if (p * m - k**2) % 2 == 0 and p * m - k**2 != 0
    ]
    return _run(tasks, threads)


def _null_rows(p: int, m_bound: int, config: ConfigFile, threads: int) -> list[ReportRow]:
    fact = config.imported_facts.negative_lens

    def evaluate(m: int, orientation: NullOrientation) -> list[ReportRow]:
        n = orientation.target_sign * p * m
        verdict = null_case(p, m, orientation)
        if n == -p and not verdict.obstructed:
            verdict = negative_lens_verdict(p, frozenset(fact.allowed), fact.citation)
        return [_overlay(config, p, 0, orientation.coefficient_sign * m, n, verdict)]

    tasks: list[Task] = [
        partial(evaluate, m, o)
        for m in range(1, m_bound + 1, 2)
        for o in NullOrientation
    ]
    return _run(tasks, threads)


def _essential_verdict(sp: SurgeryProblem, n: int) -> Verdict:
    verdict = essential_case(sp, n)
    if verdict.obstructed:
        return verdict
    by_form = linking_form_case(sp, n)
    if by_form.obstructed:
        return by_form
    if verdict.outcome == Outcome.OUTSIDE_APPLICABILITY:
        assert isinstance(verdict.witness, Hypothesis)
        return Verdict(
            outcome=Outcome.UNDETERMINED, engine=verdict.engine, witness=verdict.witness
        )
    return verdict


def _essential_rows(
    p: int, k: int, m_bound: int, config: ConfigFile, threads: int
) -> list[ReportRow]:
    def evaluate(m: int) -> list[ReportRow]:
        sp = SurgeryProblem.of(p, k, m)
        return [
            _overlay(config, p, k, m, n, _essential_verdict(sp, n))
            for n in (sp.discriminant, -sp.discriminant)
        ]

    tasks: list[Task] = [
        partial(evaluate, m)
        for m in range(-m_bound, m_bound + 1)
        if (p * m - k**2) % 2 != 0
    ]
    return _run(tasks, threads)


def decide(p: int, k: int, m: int, n: int, config: ConfigFile | None = None) -> Verdict:
    """Verdict for the single surgery (k, m) -> L(n, 1), realizations included.

    Even n goes to the Spin test, k = 0 to the null-homologous formula and
    k >= 1 to the essential formula followed by the linking form.
    """
    sp = SurgeryProblem.of(p, k, m)
    config = config or _default_config()
    order = p * abs(m) if k == 0 else abs(sp.discriminant)
    if order == 0 or abs(n) != order:
        raise InvalidParams(f"L({n},1) cannot arise from (p, k, m) = ({p}, {k}, {m})")
    if n % 2 == 0:
        verdict = spin_deltad_check(p, n)
    elif k == 0:
        sign = "+" if m > 0 else "-"
        orientation = NullOrientation(sign + ("+" if n > 0 else "-"))
        verdict = null_case(p, abs(m), orientation)
        if n == -p and not verdict.obstructed:
            fact = config.imported_facts.negative_lens
            verdict = negative_lens_verdict(p, frozenset(fact.allowed), fact.citation)
    else:
        verdict = _essential_verdict(sp, n)
    return _overlay(config, p, k, m, n, verdict).verdict


def _not_obstructed(rows: list[ReportRow]) -> set[int]:
    return {row.n for row in rows if not row.verdict.obstructed}


def classify_even(
    p: int, m_bound: int = 12, config: ConfigFile | None = None, threads: int = 1
) -> set[int]:
    """Even n such that L(n, 1) survives the Spin test from L(p, 1)."""
    _check_p(p)
    rows = _even_rows(p, m_bound, config or _default_config(), threads)
    return _not_obstructed(rows)


def classify_null(
    p: int, m_bound: int = 12, config: ConfigFile | None = None, threads: int = 1
) -> set[int]:
    """n reachable by surgery on a null-homologous knot in L(p, 1)."""
    _check_p(p)
    rows = _null_rows(p, m_bound, config or _default_config(), threads)
    return _not_obstructed(rows)


def classify_essential(
    p: int, k: int, m_bound: int = 12, config: ConfigFile | None = None, threads: int = 1
) -> list[ReportRow]:
    if not 1 <= k <= (p - 1) // 2:
        raise InvalidParams(f"Essential knots in L({p},1) need 1 <= k <= {(p - 1) // 2}")
    _check_p(p)
    return _essential_rows(p, k, m_bound, config or _default_config(), threads)


def _summarise(rows: list[ReportRow]) -> tuple[set[int], set[int], set[int]]:
    outcomes = map_reduce(rows, keyfunc=lambda r: r.n, valuefunc=lambda r: r.verdict.outcome)
    realized = {n for n, o in outcomes.items() if Outcome.REALIZED in o}
    obstructed = {n for n, o in outcomes.items() if all(x == Outcome.OBSTRUCTED for x in o)}
    undetermined = set(outcomes) - realized - obstructed
    return realized, obstructed, undetermined


def classify_all(
    p: int, m_bound: int = 12, config: ConfigFile | None = None, threads: int = 1
) -> ClassificationReport:
    _check_p(p)
    config = config or _default_config()
    logger.info("Classifying distance one surgeries", p=p, m_bound=m_bound)
    rows = _even_rows(p, m_bound, config, threads) + _null_rows(p, m_bound, config, threads)
    for k in range(1, (p - 1) // 2 + 1):
        rows += _essential_rows(p, k, m_bound, config, threads)
    rows.sort(key=lambda row: (row.k, row.m, row.n))
    realized, obstructed, undetermined = _summarise(rows)
    logger.info(
        "Classification done",
        p=p,
        rows=len(rows),
        realized=sorted(realized),
        undetermined=sorted(undetermined),
    )
    return ClassificationReport(
        p=p,
        m_bound=m_bound,
        rows=tuple(rows),
        realized=tuple(sorted(realized)),
        obstructed=tuple(sorted(obstructed)),
        undetermined=tuple(sorted(undetermined)),
    )


def _encode(value: Any) -> Any:
    if isinstance(value, Fraction):
        return format_rational(value)
    return pydantic_encoder(value)


def _witness_text(verdict: Verdict) -> str:
    return verdict.witness.json(encoder=_encode)


def render_verdict(verdict: Verdict) -> str:
    return verdict.json(encoder=_encode)


def _render_csv(report: ClassificationReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["schema", "p", "k", "m", "n", "verdict", "engine", "witness"])
    for row in report.rows:
        writer.writerow(
            [
                report.schema_version,
                report.p,
                row.k,
                row.m,
                row.n,
                row.verdict.outcome.value,
                row.verdict.engine,
                _witness_text(row.verdict),
            ]
        )
    return buffer.getvalue()


def _render_text(report: ClassificationReport) -> str:
    header = ("k", "m", "n", "verdict", "engine")
    table = [header] + [
        (str(r.k), str(r.m), str(r.n), r.verdict.outcome.value, r.verdict.engine)
        for r in report.rows
    ]
    widths = [max(len(line[i]) for line in table) for i in range(len(header))]
    lines = []
    for line in table:
        numbers = [cell.rjust(w) for cell, w in zip(line[:3], widths)]
        words = [cell.ljust(w) for cell, w in zip(line[3:], widths[3:])]
        lines.append("  ".join(numbers + words).rstrip())

    def listed(values: tuple[int, ...]) -> str:
        return " ".join(str(v) for v in values) or "-"

    lines += [
        "",
        f"p={report.p} m_bound={report.m_bound}",
        f"realized: {listed(report.realized)}",
        f"obstructed: {listed(report.obstructed)}",
        f"undetermined: {listed(report.undetermined)}",
        f"not obstructed: {listed(report.not_obstructed)}",
    ]
    return "\n".join(lines) + "\n"


def render_report(
    report: ClassificationReport, report_format: ReportFormat = ReportFormat.json
) -> str:
    match report_format:
        case ReportFormat.json:
            return report.json(by_alias=True) + "\n"
        case ReportFormat.csv:
            return _render_csv(report)
        case ReportFormat.text:
            return _render_text(report)
    raise InvalidParams(f"Unknown report format {report_format!r}")


def load_report(text: str) -> ClassificationReport:
    return ClassificationReport.parse_raw(text)
