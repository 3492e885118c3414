"""Exception hierarchy shared by every clearbench module."""


class ClearError(Exception):
    """Base class for all errors raised by clearbench."""


# graph construction and queries


class GraphError(ClearError):
    pass


class CycleInDag(GraphError):
    pass


class EdgeKindMismatch(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class UnknownEndpoint(GraphError):
    pass


class UnknownNode(GraphError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class WrongGraphKind(GraphError):
    pass


class NoPathExists(GraphError):
    pass


class NoCycleExists(GraphError):
    pass


class CyclicGraph(GraphError):
    pass


class InvalidPath(GraphError):
    pass


# causal oracles


class EndpointInZ(GraphError):
    pass


class Unblockable(GraphError):
    pass


class NoSeparator(GraphError):
    pass


class NoOtherMember(GraphError):
    pass


class NodeSetMismatch(GraphError):
    pass


class NoBackdoorPath(GraphError):
    pass


# benchmark generation


class BenchError(ClearError):
    pass


class InfeasibleSpec(BenchError):
    pass


class UnsupportedPair(BenchError):
    pass


class ExhaustedRetries(BenchError):
    pass


class ConfigInvalid(BenchError):
    pass


class ParseError(ConfigInvalid):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class MissingDefinition(BenchError):
    pass


class InsufficientShots(BenchError):
    pass


# evaluation


class ModelCallError(ClearError):
    pass


class Timeout(ModelCallError):
    pass


class AuthMissing(ModelCallError):
    pass


class HttpError(ModelCallError):
    def __init__(self, status, body=""):
        self.status = status
        super().__init__(f"HTTP {status}: {body[:200]}")


class RateLimited(HttpError):
    def __init__(self, body=""):
        super().__init__(429, body)


class UnknownQuestionId(ClearError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class MissingStyleRun(ClearError):
    pass


class IoError(ClearError, OSError):
    """Reading or writing a pipeline artifact failed."""
