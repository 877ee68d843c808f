"""Exception hierarchy. Runtime failures inside a simulation are reported as
outcomes, not raised; these are for misuse of the library API."""


class CooplandError(Exception):
    pass


class DegenerateHorizon(CooplandError, ValueError):
    pass


class OutOfDomain(CooplandError, ValueError):
    pass


class Infeasible(CooplandError):
    """The convex solver certified that no trajectory meets the constraints."""


class SolverFailure(CooplandError):
    """Iteration cap hit without convergence or an infeasibility certificate."""


class NoFeasibleHorizon(CooplandError):
    pass


class InvertedThrust(CooplandError, ValueError):
    pass


class FreeFallSingularity(CooplandError, ValueError):
    pass


class GimbalDegeneracy(CooplandError, ValueError):
    pass


class BehindCamera(CooplandError, ValueError):
    pass


class DegenerateJacobian(CooplandError, ValueError):
    pass


class TiltOutOfRange(CooplandError, ValueError):
    pass


class DegenerateCovariances(CooplandError, ValueError):
    pass


class ConfigError(CooplandError):
    pass


class ParseError(ConfigError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ValidationError(ConfigError):
    def __init__(self, key: str, reason: str):
        super().__init__(f"{key}: {reason}")
        self.key = key
        self.reason = reason
