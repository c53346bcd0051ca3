"""Exception hierarchy for edgesched."""


class EdgeSchedError(Exception):
    """Base class for every error raised by this package."""


class InvalidModel(EdgeSchedError, ValueError):
    """A domain object was constructed with values that break its invariants."""


class NonPositiveFrequency(InvalidModel):
    pass


class GammaOutOfRange(InvalidModel):
    pass


class WrongLayer(EdgeSchedError):
    """An operation was applied to a node of the wrong layer."""


class UnknownExecutor(EdgeSchedError, KeyError):
    pass


class MissingLink(EdgeSchedError):
    """A remote executor was chosen but no link reaches it from the task's device."""


class MissingAccuracyEntry(EdgeSchedError, KeyError):
    pass


class NoNodeOfLayer(EdgeSchedError):
    """A policy demands a layer the scenario does not provide for a task's device."""


class SearchSpaceTooLarge(EdgeSchedError):
    pass


class CapacityConfigured(EdgeSchedError):
    """Greedy solving is only exact without node capacities."""


class ConfigParse(EdgeSchedError):
    pass


class ScenarioLoad(EdgeSchedError):
    pass


class OutputWrite(EdgeSchedError):
    pass
