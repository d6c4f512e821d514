"""Exception hierarchy for game construction, conversion and solving."""


class GameError(Exception):
    """Base class for all library errors."""


# -- game construction / validation -------------------------------------------

class DuplicateNodeId(GameError):
    pass


class ProbabilityNotNormalized(GameError):
    pass


class MissingVisibilityEntry(GameError):
    pass


class CyclicStructure(GameError):
    pass


class UnknownPlayer(GameError):
    pass


class ActionMismatchWithinInfoset(GameError):
    pass


# -- transforms / conversion ---------------------------------------------------

class NotATeamGame(GameError):
    pass


class NotPublicTurnTaking(GameError):
    pass


class ImperfectRecallInput(GameError):
    pass


class ExclusionDataMissing(GameError):
    pass


class IllegalActionInPlan(GameError):
    pass


class IllegalPrescription(GameError):
    pass


class OriginMismatch(GameError):
    pass


# -- generators ----------------------------------------------------------------

class SpecOutOfBounds(GameError):
    pass


# -- solvers -------------------------------------------------------------------

class ImperfectRecallPlayer(GameError):
    pass


class EmptyMatrix(GameError):
    pass


class GameTooLarge(GameError):
    pass


class InvalidIterationCount(GameError):
    pass


class IncompleteProfile(GameError):
    pass


# -- census --------------------------------------------------------------------

class NonDivisibleLevelProfile(GameError):
    pass
