"""
Recognition of K-MPCA instances

Two channels are equivalent when every user sees the same gain on both.
The default method hashes gain columns (O(MN)); the pairwise-graph method
builds the equivalence graph over all channel pairs and reads the groups off
its connected components (O(MN^2)). Both return identical structures.
"""

import logging
from collections import deque
from typing import Dict, List, Literal, Sequence

import numpy as np

from app.errors import DimensionMismatch
from app.models.schemas import GroupStructure, MpcaInstance, RateModel

logger = logging.getLogger(__name__)

Method = Literal["hash", "graph"]


def relabel(labels: Sequence) -> GroupStructure:
    """Group ids 0..K-1 in order of first occurrence"""
    ids: Dict = {}
    return GroupStructure(group_id=tuple(ids.setdefault(label, len(ids)) for label in labels))


def _column_keys(instance: MpcaInstance, tolerance: float) -> np.ndarray:
    """Per-channel columns compared for equality: raw gains, or quantized log-gains"""
    if tolerance < 0:
        raise ValueError("tolerance must be nonnegative")
    if tolerance == 0:
        return instance.gains
    return np.round(np.log2(instance.gains) / tolerance).astype(np.int64)


def _recognize_by_hash(keys: np.ndarray) -> GroupStructure:
    return relabel(keys[:, n].tobytes() for n in range(keys.shape[1]))


def _recognize_by_graph(keys: np.ndarray) -> GroupStructure:
    n_channels = keys.shape[1]
    neighbours: List[List[int]] = [[] for _ in range(n_channels)]
    for a in range(n_channels):
        for b in range(a + 1, n_channels):
            if np.array_equal(keys[:, a], keys[:, b]):
                neighbours[a].append(b)
                neighbours[b].append(a)

    component = [-1] * n_channels
    count = 0
    for start in range(n_channels):
        if component[start] >= 0:
            continue
        component[start] = count
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for other in neighbours[node]:
                if component[other] < 0:
                    component[other] = count
                    queue.append(other)
        count += 1
    # components are discovered from their smallest channel, so this is first-occurrence order
    return GroupStructure(group_id=tuple(component))


def recognize(instance: MpcaInstance, tolerance: float = 0.0, method: Method = "hash") -> GroupStructure:
    keys = _column_keys(instance, tolerance)
    if method == "hash":
        structure = _recognize_by_hash(keys)
    elif method == "graph":
        structure = _recognize_by_graph(keys)
    else:
        raise ValueError(f"unknown recognition method {method!r}")
    logger.debug(f"recognize({method}, tol={tolerance}): K={structure.num_groups}")
    return structure


def fast_is_1mpca(instance: MpcaInstance) -> bool:
    """One pass over the gain matrix: is every user's row constant?"""
    gains = instance.gains
    return bool(np.all(gains == gains[:, :1]))


def synthesize(
    structure: GroupStructure,
    user_group_gains: np.ndarray,
    rate_targets: Sequence[float],
    rate_model: RateModel = RateModel.LOG_SNR,
) -> MpcaInstance:
    """Instance whose channel n carries its group's gain column"""
    user_group_gains = np.asarray(user_group_gains, dtype=np.float64)
    if user_group_gains.shape[1] != structure.num_groups:
        raise DimensionMismatch(
            f"{user_group_gains.shape[1]} gain columns for {structure.num_groups} groups"
        )
    gains = user_group_gains[:, list(structure.group_id)]
    return MpcaInstance(
        num_users=gains.shape[0],
        num_channels=gains.shape[1],
        gains=gains,
        rate_targets=rate_targets,
        rate_model=rate_model,
        channel_groups=structure.group_id,
    )
