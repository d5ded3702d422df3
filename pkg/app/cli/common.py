"""
Helpers shared by the CLI commands
"""

import json
from pathlib import Path
from typing import Any, List, Optional, TextIO

from app.errors import BadFlags
from app.models.schemas import MpcaInstance
from app.utils.instance_io import read_instance


def read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise BadFlags(f"cannot read {path}: {e.strerror or e}") from e


def write_bytes(path: str, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as e:
        raise BadFlags(f"cannot write {path}: {e.strerror or e}") from e


def load_instance(path: str) -> MpcaInstance:
    return read_instance(read_bytes(path))


def parse_int_list(text: Optional[str], flag: str) -> Optional[List[int]]:
    """`3,3,1` -> [3, 3, 1]"""
    if text is None:
        return None
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise BadFlags(f"{flag} expects comma-separated integers, got {text!r}") from None


def emit_json(out: TextIO, payload: Any) -> None:
    out.write(json.dumps(payload) + "\n")


class CliContext:
    """Services and the output stream handed to every command"""

    def __init__(self, manager, out: TextIO):
        self.manager = manager
        self.out = out
