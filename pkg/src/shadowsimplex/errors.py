"""Exception hierarchy for the package."""


class ShadowSimplexError(Exception):
    """Base class for every error raised by shadowsimplex."""


class DegenerateSpan(ShadowSimplexError):
    pass


class SingularSystem(ShadowSimplexError):
    pass


class ParseError(ShadowSimplexError):
    pass


class InvariantError(ShadowSimplexError):
    pass


class UnboundedInput(ShadowSimplexError):
    pass


class BudgetExceeded(ShadowSimplexError):
    pass


class StartNotOnShadow(ShadowSimplexError):
    pass


class DegeneratePivot(ShadowSimplexError):
    pass


class NotAVertex(ShadowSimplexError):
    pass


class CertificateInfeasible(ShadowSimplexError):
    pass


class PreconditionUnmet(ShadowSimplexError):
    pass


class RoundnessViolation(ShadowSimplexError):
    pass


class HypothesisViolation(ShadowSimplexError):
    pass


class NoShadowEdges(ShadowSimplexError):
    pass


class IoError(ShadowSimplexError):
    pass
