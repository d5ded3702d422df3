"""
DIMACS CNF reader and writer
"""

import logging
from typing import List, Tuple, Union

from app.errors import ParseError
from app.models.sat import CnfFormula

logger = logging.getLogger(__name__)


def parse_dimacs(data: Union[bytes, str]) -> CnfFormula:
    """Parse `p cnf v w` text into a checked 3-SAT formula"""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"CNF is not valid UTF-8: {exc}") from exc

    header = None
    clauses: List[Tuple[int, ...]] = []
    pending: List[int] = []
    for lineno, raw in enumerate(data.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line == "%":
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise ParseError("duplicate problem line", line=lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"expected 'p cnf <vars> <clauses>', got {line!r}", line=lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"non-integer counts in {line!r}", line=lineno) from None
            continue
        if header is None:
            raise ParseError("clause before the problem line", line=lineno)
        for token in line.split():
            try:
                literal = int(token)
            except ValueError:
                raise ParseError(f"bad literal {token!r}", line=lineno) from None
            if literal == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(literal)

    if header is None:
        raise ParseError("missing 'p cnf' problem line")
    if pending:
        raise ParseError("last clause is not terminated by 0")
    num_vars, num_clauses = header
    if num_clauses != len(clauses):
        raise ParseError(f"header announces {num_clauses} clauses, found {len(clauses)}")

    formula = CnfFormula(num_vars=num_vars, clauses=tuple(clauses))
    formula.check()
    logger.debug(f"parsed CNF with v={formula.num_vars}, w={formula.num_clauses}")
    return formula


def format_dimacs(cnf: CnfFormula) -> bytes:
    lines = [f"p cnf {cnf.num_vars} {cnf.num_clauses}"]
    lines.extend(" ".join(str(lit) for lit in clause) + " 0" for clause in cnf.clauses)
    return ("\n".join(lines) + "\n").encode("utf-8")
