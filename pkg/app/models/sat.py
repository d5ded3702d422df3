"""
3-SAT formulas and the layout of the gadget instances built from them
"""

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

from app.errors import MalformedCnf, NotThreeSat, OccurrenceBoundViolated

MAX_LITERAL_OCCURRENCES = 3


@dataclass(frozen=True)
class CnfFormula:
    """Clauses use DIMACS literals: +i is variable i, -i its negation (1-based)"""

    num_vars: int
    clauses: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(int(lit) for lit in clause) for clause in self.clauses))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def occurrences(self) -> Counter:
        return Counter(lit for clause in self.clauses for lit in clause)

    def check(self, require_every_literal: bool = True) -> None:
        """Raise unless this is a 3-SAT formula with every literal used 1..3 times

        The gadget construction itself only needs the upper bound; pass
        require_every_literal=False to allow unused literals.
        """
        if self.num_vars < 1:
            raise MalformedCnf(f"need at least one variable, got {self.num_vars}")
        if not self.clauses:
            raise MalformedCnf("need at least one clause")
        for index, clause in enumerate(self.clauses):
            if len(clause) != 3:
                raise NotThreeSat(index, len(clause))
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise MalformedCnf(f"clause {index + 1} uses literal {lit} outside 1..{self.num_vars}")
        counts = self.occurrences()
        for var in range(1, self.num_vars + 1):
            for lit in (var, -var):
                lowest = 1 if require_every_literal else 0
                if not lowest <= counts[lit] <= MAX_LITERAL_OCCURRENCES:
                    raise OccurrenceBoundViolated(lit, counts[lit])

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        """assignment[i] is the value of variable i + 1"""
        return all(
            any(assignment[abs(lit) - 1] == (lit > 0) for lit in clause)
            for clause in self.clauses
        )


class ReductionMode(str, Enum):
    A = "a"  # plain reduction, unrestricted allocation
    B = "b"  # dummy channels + consecutive blocks of given size


class ChannelKind(str, Enum):
    SUPER = "super"
    LITERAL = "literal"
    AUXILIARY = "auxiliary"
    DUMMY = "dummy"


class UserKind(str, Enum):
    LITERAL = "literal"
    CLAUSE = "clause"


@dataclass(frozen=True)
class ChannelRole:
    kind: ChannelKind
    var: Optional[int] = None
    positive: Optional[bool] = None
    copy: Optional[int] = None
    clause: Optional[int] = None

    @property
    def label(self) -> str:
        if self.kind is ChannelKind.SUPER:
            return f"S{self.var}"
        if self.kind is ChannelKind.DUMMY:
            return f"D{self.var}"
        if self.kind is ChannelKind.AUXILIARY:
            return f"A{self.clause + 1}"
        name = f"z{self.var}" if self.positive else f"~z{self.var}"
        return name + "'" * self.copy


@dataclass(frozen=True)
class UserRole:
    kind: UserKind
    var: Optional[int] = None
    positive: Optional[bool] = None
    clause: Optional[int] = None


@dataclass(frozen=True)
class GadgetConstants:
    g_s: float
    g_c: float
    g_a: float
    g_l: float
    g_eps: float

    @classmethod
    def for_clauses(cls, num_clauses: int) -> "GadgetConstants":
        w = float(num_clauses)
        g_a = 1.0 / (0.9 * w + 0.1)
        return cls(g_s=1.0, g_c=1.0, g_a=g_a, g_l=g_a / 26.0, g_eps=1.0 / (53.0 * w))


@dataclass(frozen=True, eq=False)
class ReductionLayout:
    mode: ReductionMode
    channel_roles: Tuple[ChannelRole, ...]
    user_roles: Tuple[UserRole, ...]
    constants: GadgetConstants
    # occurrence_channels[c][p]: literal channel standing for position p of clause c
    occurrence_channels: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "_channels", {role: n for n, role in enumerate(self.channel_roles)})
        object.__setattr__(self, "_users", {role: m for m, role in enumerate(self.user_roles)})

    @property
    def num_vars(self) -> int:
        return sum(1 for role in self.channel_roles if role.kind is ChannelKind.SUPER)

    @property
    def num_clauses(self) -> int:
        return len(self.occurrence_channels)

    def super_channel(self, var: int) -> int:
        return self._channels[ChannelRole(ChannelKind.SUPER, var=var)]

    def literal_channels(self, var: int, positive: bool) -> Tuple[int, ...]:
        return tuple(
            self._channels[ChannelRole(ChannelKind.LITERAL, var=var, positive=positive, copy=copy)]
            for copy in range(MAX_LITERAL_OCCURRENCES)
        )

    def dummy_channels(self, var: int) -> Tuple[int, ...]:
        return tuple(
            self._channels[role] for role in
            (ChannelRole(ChannelKind.DUMMY, var=var, copy=copy) for copy in range(2))
            if role in self._channels
        )

    def aux_channel(self, clause: int) -> int:
        return self._channels[ChannelRole(ChannelKind.AUXILIARY, clause=clause)]

    def literal_user(self, var: int, positive: bool) -> int:
        return self._users[UserRole(UserKind.LITERAL, var=var, positive=positive)]

    def clause_user(self, clause: int) -> int:
        return self._users[UserRole(UserKind.CLAUSE, clause=clause)]

    def users_of_kind(self, kind: UserKind) -> Tuple[int, ...]:
        return tuple(m for m, role in enumerate(self.user_roles) if role.kind is kind)

    def to_dict(self) -> Dict:
        return {
            "mode": self.mode.value,
            "channels": [role.label for role in self.channel_roles],
            "constants": {
                "g_s": self.constants.g_s, "g_c": self.constants.g_c, "g_a": self.constants.g_a,
                "g_l": self.constants.g_l, "g_eps": self.constants.g_eps,
            },
        }
