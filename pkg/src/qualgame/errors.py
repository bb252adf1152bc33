"""Exception types raised across the package."""


class GameError(ValueError):
    """A game document or game object failed validation."""


class MissingTransition(GameError):
    def __init__(self, s, a, b):
        super().__init__(f"no transition for ({s}, {a}, {b})")
        self.triple = (s, a, b)


class DuplicateTransition(GameError):
    def __init__(self, s, a, b):
        super().__init__(f"transition ({s}, {a}, {b}) given more than once")
        self.triple = (s, a, b)


class BadProbabilitySum(GameError):
    def __init__(self, s, a, b, total):
        super().__init__(f"probabilities of ({s}, {a}, {b}) sum to {total!r}")
        self.triple = (s, a, b)
        self.total = total


class UnknownState(GameError):
    def __init__(self, name):
        super().__init__(f"unknown state {name!r}")
        self.name = name


class UnknownAction(GameError):
    def __init__(self, state, action):
        super().__init__(f"unknown action {action!r} at state {state!r}")
        self.state = state
        self.action = action


class EmptyMoveSet(GameError):
    def __init__(self, s):
        super().__init__(f"state {s!r} has an empty move set")
        self.state = s


class MixedProbabilityMode(GameError):
    def __init__(self, s, a, b):
        super().__init__(f"transition ({s}, {a}, {b}) mixes explicit and absent probabilities")
        self.triple = (s, a, b)


class CaseMismatch(ValueError):
    """Priorities do not fit the normal form a formula requires."""


class NestingViolation(ValueError):
    """Predecessor arguments are not nested as the operator requires."""


class BlowupGuard(RuntimeError):
    """An enumeration would exceed its configured size limit."""

    def __init__(self, count, limit):
        super().__init__(f"enumeration size {count} exceeds limit {limit}")
        self.count = count
        self.limit = limit


class InternalSoundnessError(RuntimeError):
    """A computed witness failed independent verification."""


class EpsSearchExhausted(RuntimeError):
    """No epsilon in the halving search met the requested bound."""


class MissingEps(ValueError):
    """A ranked strategy was instantiated without an epsilon."""


class NoProbabilities(ValueError):
    """Numbers were required but the model only carries supports."""
