"""Exception hierarchy.

Every error raised on purpose by the library derives from ``ElasticaError`` so
callers (and the CLI) can map classes to exit codes.
"""


class ElasticaError(Exception):
    exit_code = 3


class ParseError(ElasticaError):
    exit_code = 2


class ZeroLength(ElasticaError):
    pass


class BadGrid(ElasticaError):
    pass


class DimensionMismatch(ElasticaError):
    pass


class GridMismatch(ElasticaError):
    pass


class LiftJump(ElasticaError):
    pass


class ZeroVariation(ElasticaError):
    pass


class BadSigma(ElasticaError):
    pass


class NotClosed(ElasticaError):
    pass


class BadFrame(ElasticaError):
    pass


class NoConvergence(ElasticaError):
    exit_code = 4


class DegeneratePath(ElasticaError):
    exit_code = 4


class DegenerateEndpoints(ElasticaError):
    exit_code = 4


class InvalidLift(ElasticaError):
    exit_code = 4


class AntipodalPair(ElasticaError):
    exit_code = 4
