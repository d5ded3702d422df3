"""
Exception hierarchy for the MPCA solver suite
"""

from typing import Optional

EXIT_INPUT_ERROR = 1
EXIT_UNSOLVABLE = 2


class MpcaError(Exception):
    """Base class for every error raised by the suite"""

    exit_code: int = EXIT_INPUT_ERROR

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__

    def to_dict(self) -> dict:
        return {"error": self.__class__.__name__, "message": self.message}


# Input / validation errors

class ParseError(MpcaError):
    """Malformed instance or CNF text"""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")
        self.line = line
        self.field = field


class DimensionMismatch(MpcaError):
    pass


class NonPositiveGain(MpcaError):
    def __init__(self, user: int, channel: int, value: float):
        super().__init__(f"gain of user {user + 1} on channel {channel + 1} is {value!r}, must be > 0")
        self.user = user
        self.channel = channel


class NonPositiveRate(MpcaError):
    def __init__(self, user: int, value: float):
        super().__init__(f"rate target of user {user + 1} is {value!r}, must be > 0")
        self.user = user


class TooManyUsers(MpcaError):
    def __init__(self, num_users: int, num_channels: int):
        super().__init__(f"{num_users} users but only {num_channels} channels (need M <= N)")


class RateTargetMissed(MpcaError):
    def __init__(self, user: int, delivered: float, target: float):
        super().__init__(f"user {user + 1} receives rate {delivered!r} < target {target!r}")
        self.user = user


class PowerRateMismatch(MpcaError):
    def __init__(self, channel: int, power: float, expected: float):
        super().__init__(f"channel {channel + 1} carries power {power!r}, rate implies {expected!r}")
        self.channel = channel


class MalformedCnf(MpcaError):
    pass


class NotThreeSat(MalformedCnf):
    def __init__(self, clause: int, size: int):
        super().__init__(f"clause {clause + 1} has {size} literals, expected exactly 3")
        self.clause = clause


class OccurrenceBoundViolated(MalformedCnf):
    def __init__(self, literal: int, count: int):
        super().__init__(f"literal {literal} occurs {count} times, must occur between 1 and 3 times")
        self.literal = literal


class BadFlags(MpcaError):
    pass


# Conditions where the input is fine but this suite will not solve it

class InstanceTooLarge(MpcaError):
    exit_code = EXIT_UNSOLVABLE


class Infeasible(MpcaError):
    exit_code = EXIT_UNSOLVABLE


class WrongStructure(MpcaError):
    exit_code = EXIT_UNSOLVABLE


class WrongModel(MpcaError):
    exit_code = EXIT_UNSOLVABLE


class NotDivisible(MpcaError):
    exit_code = EXIT_UNSOLVABLE


class Unsupported(MpcaError):
    exit_code = EXIT_UNSOLVABLE
