"""Exception types. Solver failures derive from SolverError, bad input from InvalidInput."""


class SdlError(Exception):
    pass


class InvalidInput(SdlError, ValueError):
    pass


class SolverError(SdlError, RuntimeError):
    pass


class OutsideCardioid(InvalidInput):
    pass


class CriticalPoint(InvalidInput):
    pass


class SlitError(InvalidInput):
    def __init__(self, a, thetas):
        super().__init__(f"parameter {a} lies on the slit: tied maxima at theta={thetas}")
        self.a = a
        self.thetas = thetas


class SingularPoint(InvalidInput):
    pass


class NoImage(InvalidInput):
    """Point lies in the open droplet, where the map is undefined."""


class InteriorOfPi(InvalidInput):
    pass


class OnVertex(InvalidInput):
    pass


class InadmissibleWord(InvalidInput):
    pass


class HitsFixedPoint(InvalidInput):
    def __init__(self, theta, index):
        super().__init__(f"orbit of {theta} hits a fixed point at iterate {index}")
        self.theta = theta
        self.index = index


class NoRealization(InvalidInput):
    pass


class NonEscaping(SolverError):
    pass


class BranchAmbiguity(SolverError):
    pass


class NoConvergence(SolverError):
    pass


class NoBracketedCrossing(SolverError):
    pass


class ContourThroughZero(SolverError):
    pass


class DerivativeAtCritical(SolverError):
    pass


class NotOddAttracting(InvalidInput):
    pass


class LinearizationDiverged(SolverError):
    pass


class InsideTricorn(InvalidInput):
    pass


class NewtonStall(SolverError):
    pass


class ContinuationStall(SolverError):
    pass


class NoPortrait(InvalidInput):
    pass


class AmbiguousRoot(SolverError):
    pass


class SeedFailed(SolverError):
    pass


class VerificationFailed(SolverError):
    pass
