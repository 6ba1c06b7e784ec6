"""
Exception hierarchy for the hood builder.
Validation problems, input-file problems and kernel failures all derive from HullError
so the command line can report them uniformly.
"""

from typing import Optional


class HullError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(HullError, ValueError):
    """The input point sequence violates an assumption of the algorithm."""


class NotPowerOfTwo(ValidationError):
    def __init__(self, count: int):
        self.count = count
        super().__init__(f"Count {count} is not a power of 2")


class XOutOfRange(ValidationError):
    def __init__(self, index: int, x: float):
        self.index = index
        self.x = x
        super().__init__(f"Point {index}: x = {x!r} is not strictly between 0 and 1")


class XNotIncreasing(ValidationError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"Point {index}: x-coordinates are not strictly increasing")


class NonFiniteCoordinate(ValidationError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"Point {index}: y-coordinate is not finite")


class DegenerateTriple(ValidationError):
    def __init__(self, i: int, j: int, k: int, det: float):
        self.triple = (i, j, k)
        self.det = det
        super().__init__(
            f"Points {i}, {j}, {k} are (nearly) collinear: |det| = {abs(det):.3e}"
        )


class PointFileError(HullError):
    """Malformed input file."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class KernelError(HullError):
    """A simulated kernel launch failed."""


class ConflictError(KernelError):
    """Raised in strict mode when a launch audit is not clean."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"Launch audit failed: {report.summary()}")


class DegenerateTangent(KernelError):
    """No thread located the common tangent of a block."""

    def __init__(self, block: int, round_index: Optional[int] = None):
        self.block = block
        self.round_index = round_index
        where = f"block {block}" if round_index is None else f"round {round_index}, block {block}"
        super().__init__(f"No common tangent found ({where})")


class OutOfBoundsAccess(KernelError, IndexError):
    def __init__(self, array: str, index: int):
        self.array = array
        self.index = index
        super().__init__(f"{array}[{index}] is outside the array")


class NoUniqueTangent(HullError):
    """Brute-force tangent search found zero or several supporting corners."""
