# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from enum import Enum
from pathlib import Path
from typing import ItemsView

import yaml
from pydantic import BaseModel
from pydantic import BaseSettings
from pydantic import FilePath
from pydantic import NonNegativeInt
from pydantic import PositiveInt


class TargetExpression(str, Enum):
    """The lens space targets a construction produces, as expressions in p."""

    P = "p"
    P_PLUS_4 = "p+4"
    P_MINUS_1 = "p-1"
    P_PLUS_1 = "p+1"
    ONE = "1"
    MINUS_ONE = "-1"
    MINUS_FIVE = "-5"
    THREE = "3"

    def evaluate(self, p: int) -> int:
        match self:
            case TargetExpression.P:
                return p
            case TargetExpression.P_PLUS_4:
                return p + 4
            case TargetExpression.P_MINUS_1:
                return p - 1
            case TargetExpression.P_PLUS_1:
                return p + 1
        return int(self.value)


class ConfigRealization(BaseModel):
    k: NonNegativeInt
    m: int
    n: list[TargetExpression]
    primes: list[int] | None
    citation: str

    def targets(self, p: int) -> set[int]:
        if self.primes is not None and p not in self.primes:
            return set()
        return {expression.evaluate(p) for expression in self.n}

    def matches(self, p: int, k: int, m: int, n: int) -> bool:
        return (self.k, self.m) == (k, m) and n in self.targets(p)


class ConfigRealizations(BaseModel):
    __root__: dict[str, ConfigRealization]

    def items(self) -> ItemsView[str, ConfigRealization]:
        return self.__root__.items()

    def match(self, p: int, k: int, m: int, n: int) -> str | None:
        """Tag of the construction realizing (p, k, m) -> L(n, 1), if any."""
        return next(
            (tag for tag, entry in self.items() if entry.matches(p, k, m, n)), None
        )


class ConfigImportedFact(BaseModel):
    allowed: list[PositiveInt]
    citation: str


class ConfigImportedFacts(BaseModel):
    negative_lens: ConfigImportedFact


class ConfigFile(BaseModel):
    realizations: ConfigRealizations
    imported_facts: ConfigImportedFacts


def get_config_file(config_file: Path) -> ConfigFile:
    with config_file.open() as f:
        config_yaml = yaml.safe_load(f)
    config = ConfigFile.parse_obj(config_yaml)
    return config


class Settings(BaseSettings):
    class Config:
        frozen = True
        env_prefix = "LENSLAB_"

    threads: PositiveInt = 1
    m_bound: PositiveInt = 12
    log_level: str = "WARNING"
    config_file: FilePath = Path(__file__).with_name("config.default.yml")
