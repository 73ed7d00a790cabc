"""Exception hierarchy shared by all modules."""


class ConsensusError(Exception):
    """Base class for every error raised by probcast."""


class GraphGenerationError(ConsensusError):
    pass


class GraphFormatError(ConsensusError):
    pass


class ProbabilityError(ConsensusError, ValueError):
    """Invalid score vector or budget for a probability design."""


class PageRankConvergenceError(ConsensusError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class EigenConvergenceError(ConsensusError):
    def __init__(self, message, iterations):
        super().__init__(message)
        self.iterations = iterations


class MixingError(ConsensusError, ValueError):
    pass


class NumericalFailure(ConsensusError):
    def __init__(self, message, round_index):
        super().__init__(message)
        self.round_index = round_index


class CalibrationError(ConsensusError):
    def __init__(self, message, spread):
        super().__init__(message)
        self.spread = spread


class DegenerateAlphaError(ConsensusError, ValueError):
    pass


class InfeasibleProjectionError(ConsensusError, ValueError):
    pass


class ConfigError(ConsensusError):
    pass
