# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0


class LensLabError(Exception):
    """Base exception."""


class InvalidParams(LensLabError, ValueError):
    """Input outside the range an operation is defined on."""


class SingularMatrix(LensLabError):
    def __init__(self, dimension: int) -> None:
        self.dimension = dimension

    def __str__(self) -> str:
        return f"Matrix of dimension {self.dimension} is singular"


class NotSymmetric(LensLabError):
    def __init__(self, row: int, column: int) -> None:
        self.row = row
        self.column = column

    def __str__(self) -> str:
        return f"Matrix is not symmetric at ({self.row}, {self.column})"


class EmptyBox(LensLabError):
    def __init__(self, vertex: int, weight: int) -> None:
        self.vertex = vertex
        self.weight = weight

    def __str__(self) -> str:
        return f"Vertex {self.vertex} has weight {self.weight} > -1, the box is empty"


class CycleDetected(LensLabError):
    def __init__(self, start: tuple[int, ...], steps: int) -> None:
        self.start = start
        self.steps = steps

    def __str__(self) -> str:
        return f"Push-down path from {self.start} revisited a state after {self.steps} steps"


class PreconditionViolated(LensLabError):
    """Engine precondition failed, e.g. a plumbing graph that is not negative definite."""


class ClassWithoutMaximiser(LensLabError):
    def __init__(self, found: int, expected: int) -> None:
        self.found = found
        self.expected = expected

    def __str__(self) -> str:
        return (
            f"Maximising initiators cover {self.found} Spin^c classes, "
            f"expected |det Q| = {self.expected}"
        )


class NotApplicable(LensLabError):
    """Operation requires data the given object does not carry."""


class DegenerateForm(LensLabError):
    """Intersection form with vanishing determinant."""


class InconsistentVerdict(LensLabError):
    """Two engines disagree, or an engine obstructs a realized surgery."""
