"""
Exception hierarchy.
Library code raises these; only src/main.py turns them into exit codes.
"""


class ToricBundleError(ValueError):
    """Base class for every domain or input error raised by the toolkit."""


class InputFormatError(ToricBundleError):
    def __init__(self, file: str, path: str, invariant: str):
        self.file = file
        self.path = path
        self.invariant = invariant
        super().__init__(f"{file}: at {path}: {invariant}")


class NonPrimitiveRay(ToricBundleError):
    def __init__(self, index: int, ray):
        self.index = index
        self.ray = tuple(ray)
        super().__init__(f"ray {index} {self.ray} is not primitive (gcd of entries must be 1)")


class NotStronglyConvex(ToricBundleError):
    def __init__(self, cone):
        self.cone = tuple(cone)
        super().__init__(f"cone {self.cone} contains a line")


class NotAFan(ToricBundleError):
    def __init__(self, first, second=None, reason: str = "intersection is not a common face"):
        self.cones = (tuple(first), tuple(second)) if second is not None else (tuple(first),)
        super().__init__(f"NotAFan: cones {self.cones}: {reason}")


class PointOutsideSupport(ToricBundleError):
    def __init__(self, point):
        self.point = tuple(point)
        super().__init__(f"point {tuple(str(x) for x in self.point)} is not in the support of the fan")


class NotSymmetric(ToricBundleError):
    pass


class NonIntegralOrbit(ToricBundleError):
    def __init__(self, ray: int, coefficients):
        self.ray = ray
        self.coefficients = tuple(coefficients)
        super().__init__(
            f"NonIntegralOrbit at ray {ray}: characteristic polynomial with "
            f"c = {tuple(str(c) for c in self.coefficients)} does not split over Z"
        )


class TypeMismatch(ToricBundleError):
    def __init__(self, ray: int, expected, found):
        self.ray = ray
        self.expected = tuple(expected)
        self.found = tuple(found)
        super().__init__(f"TypeMismatch at ray {ray}: flag type {self.found}, expected {self.expected}")


class ReconstructionInconsistent(ToricBundleError):
    pass


class CensusTooLarge(ToricBundleError):
    def __init__(self, size: int, limit: int):
        self.size = size
        self.limit = limit
        super().__init__(f"census would enumerate {size} tuples, above the limit {limit}")


class NonLinearChart(ToricBundleError):
    def __init__(self, cone, detail: str):
        self.cone = tuple(cone)
        self.detail = detail
        super().__init__(f"LinearityViolation on cone {self.cone}: {detail}")
