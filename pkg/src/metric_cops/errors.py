"""Exception types raised across the package."""


class MetricCopsError(Exception):
    """Base class for every error this package raises on purpose."""


# metric graphs
class DisconnectedGraph(MetricCopsError, ValueError):
    pass


class NonpositiveLength(MetricCopsError, ValueError):
    pass


class UnknownVertex(MetricCopsError, KeyError):
    pass


class InvalidPoint(MetricCopsError, ValueError):
    pass


class OutOfRange(MetricCopsError, ValueError):
    pass


# constructions
class NonpositiveScale(MetricCopsError, ValueError):
    pass


class EmptyFamily(MetricCopsError, ValueError):
    pass


class InvalidBasepoint(MetricCopsError, ValueError):
    pass


class NonpositiveHeight(MetricCopsError, ValueError):
    pass


class TooFewLevels(MetricCopsError, ValueError):
    pass


class DisconnectedSubspace(MetricCopsError, ValueError):
    pass


class NotSubgraph(MetricCopsError, ValueError):
    pass


# game engine
class BadPlacement(MetricCopsError, ValueError):
    pass


class IllegalMove(MetricCopsError):
    """A strategy proposed a point farther than the agility allows."""

    def __init__(self, agent, step, travelled, tau):
        self.agent = agent
        self.step = step
        self.travelled = travelled
        self.tau = tau
        super().__init__(
            f"{agent} moved {travelled!r} > tau={tau!r} at step {step}"
        )


class EmptyTrace(MetricCopsError, ValueError):
    pass


# discrete solver
class BudgetExceeded(MetricCopsError):
    def __init__(self, states, budget):
        self.states = states
        self.budget = budget
        super().__init__(f"{states} states exceed the budget of {budget}")


class UnknownState(MetricCopsError, KeyError):
    pass


# strategies
class InconsistentState(MetricCopsError, ValueError):
    pass


class NoSuitableComponent(MetricCopsError, ValueError):
    pass


class MissingChart(MetricCopsError, KeyError):
    pass


class ScheduleMismatch(MetricCopsError, ValueError):
    pass


# cli / io
class SchemaMismatch(MetricCopsError, ValueError):
    pass
