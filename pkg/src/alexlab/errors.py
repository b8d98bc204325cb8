"""Exception types shared across the package."""


class AlexlabError(Exception):
    pass


class DomainError(AlexlabError, ValueError):
    """A point or argument lies outside the domain where an operation is defined."""


class BracketError(AlexlabError, ValueError):
    pass


class ConvergenceError(AlexlabError, RuntimeError):
    pass


class ConeMembershipError(DomainError):
    pass


class PoleError(DomainError):
    pass


class GeometryError(AlexlabError):
    """Surface geometry violates a precondition (degenerate top, frame failure, ...)."""


class PreconditionError(AlexlabError):
    pass


class DegenerateDirectionError(AlexlabError):
    """The local graph vanishes identically along the probed direction."""


class OrderError(AlexlabError):
    pass


class InstanceError(AlexlabError):
    pass


class ScenarioError(AlexlabError):
    pass
