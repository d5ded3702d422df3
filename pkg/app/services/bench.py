"""
Benchmark sweeps over generated instances
"""

import asyncio
import csv
import io
import logging
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from app.config import settings
from app.errors import BadFlags
from app.services.generator import generate_instance
from app.services.solver_manager import SolverManager

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("algo", "M", "N", "K", "seed", "objective", "wall_time_s")
_SWEEP = re.compile(r"^(?P<axis>[MN])=(?P<start>\d+)\.\.(?P<stop>\d+)(?::(?P<step>\d+))?$")


def parse_sweep(text: str) -> Tuple[str, List[int]]:
    """`N=a..b` doubles from a up to b, `N=a..b:s` steps by s; `M=...` likewise"""
    match = _SWEEP.match(text.strip())
    if not match:
        raise BadFlags(f"bad sweep {text!r}, expected N=a..b[:step] or M=a..b[:step]")
    start, stop = int(match["start"]), int(match["stop"])
    if start < 1 or stop < start:
        raise BadFlags(f"sweep bounds must satisfy 1 <= a <= b, got {start}..{stop}")
    values = []
    if match["step"] is None:
        value = start
        while value <= stop:
            values.append(value)
            value *= 2
    else:
        step = int(match["step"])
        if step < 1:
            raise BadFlags("sweep step must be positive")
        values = list(range(start, stop + 1, step))
    return match["axis"], values


@dataclass(frozen=True)
class BenchCell:
    algo: str
    users: int
    channels: int
    k: int
    seed: int


def plan_cells(algo: str, sweep: str, seeds: int = 1, seed: int = 0,
               users: int = 8, channels: int = 64, k: int = 1) -> List[BenchCell]:
    if algo not in SolverManager().algorithms:
        raise BadFlags(f"unknown algorithm {algo!r}")
    axis, values = parse_sweep(sweep)
    if seeds < 1:
        raise BadFlags("--seeds must be positive")
    cells = []
    for value in values:
        m, n = (value, channels) if axis == "M" else (users, value)
        for offset in range(seeds):
            cells.append(BenchCell(algo=algo, users=m, channels=n, k=k, seed=seed + offset))
    return cells


def run_cell(cell: BenchCell, manager: Optional[SolverManager] = None) -> Dict:
    manager = manager or SolverManager()
    instance = generate_instance(cell.users, cell.channels, k=cell.k, seed=cell.seed)
    report = manager.solve(instance, cell.algo)
    return {
        "algo": report.algorithm,
        "M": cell.users,
        "N": cell.channels,
        "K": cell.k,
        "seed": cell.seed,
        "objective": report.objective,
        "wall_time_s": report.wall_time,
    }


async def run_cells(cells: Sequence[BenchCell], threads: Optional[int] = None) -> List[Dict]:
    """Cells run in worker processes, `threads` at a time; rows come back in cell order"""
    if threads is None:
        threads = settings.threads
    if threads < 1:
        raise BadFlags("--threads must be positive")
    loop = asyncio.get_running_loop()
    logger.info(f"📊 Running {len(cells)} benchmark cells on {threads} worker processes")
    with ProcessPoolExecutor(max_workers=threads) as executor:
        futures = [loop.run_in_executor(executor, run_cell, cell) for cell in cells]
        rows = await asyncio.gather(*futures)
    return list(rows)


def format_csv(rows: Sequence[Dict]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()
