"""
JSON reading and writing for instances, allocations and solve reports
"""

import hashlib
import json
import logging
from typing import Any, Dict, Union

from pydantic import ValidationError

from app.errors import ParseError
from app.models.documents import InstanceDocument, SolveReportDocument
from app.models.schemas import Allocation, MpcaInstance, SolveReport

logger = logging.getLogger(__name__)


def _load_json(data: Union[bytes, str]) -> Any:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}") from exc
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON ({exc.msg}, column {exc.colno})", line=exc.lineno) from exc


def _first_validation_error(exc: ValidationError) -> ParseError:
    error = exc.errors()[0]
    field = ".".join(str(part) for part in error["loc"])
    return ParseError(error["msg"], field=field or None)


def _problem_payload(instance: MpcaInstance) -> Dict[str, Any]:
    payload: Dict[str, Any] = {
        "rate_model": instance.rate_model.value,
        "num_users": instance.num_users,
        "num_channels": instance.num_channels,
        "gains": instance.gains.tolist(),
        "rate_targets": instance.rate_targets.tolist(),
    }
    if instance.channel_groups is not None:
        payload["channel_groups"] = list(instance.channel_groups)
    return payload


def read_instance(data: Union[bytes, str], validate: bool = True) -> MpcaInstance:
    """Parse instance JSON; by default the result is also validated"""
    raw = _load_json(data)
    try:
        document = InstanceDocument.model_validate(raw)
    except ValidationError as exc:
        raise _first_validation_error(exc) from exc

    instance = MpcaInstance(
        num_users=document.num_users,
        num_channels=document.num_channels,
        gains=document.gains,
        rate_targets=document.rate_targets,
        rate_model=document.rate_model,
        channel_groups=document.channel_groups,
        metadata=document.metadata,
    )
    if validate:
        # local import: feasibility imports this module for digests
        from app.services.feasibility import validate as validate_instance

        validate_instance(instance)
    logger.debug(f"Read instance M={instance.num_users} N={instance.num_channels}")
    return instance


def write_instance(instance: MpcaInstance) -> bytes:
    payload = _problem_payload(instance)
    if instance.metadata:
        payload["metadata"] = dict(instance.metadata)
    return (json.dumps(payload) + "\n").encode("utf-8")


def canonical_bytes(instance: MpcaInstance) -> bytes:
    """Compact, key-sorted problem data; metadata is not part of the problem"""
    return json.dumps(_problem_payload(instance), sort_keys=True, separators=(",", ":")).encode("utf-8")


def instance_digest(instance: MpcaInstance) -> str:
    return hashlib.sha256(canonical_bytes(instance)).hexdigest()


def write_report(report: SolveReport) -> bytes:
    return (json.dumps(report.to_dict()) + "\n").encode("utf-8")


def read_report(data: Union[bytes, str]) -> SolveReport:
    raw = _load_json(data)
    try:
        document = SolveReportDocument.model_validate(raw)
    except ValidationError as exc:
        raise _first_validation_error(exc) from exc
    allocation = Allocation(
        channel_owner=[None if owner is None else owner - 1 for owner in document.channel_owner],
        rates=document.rates,
        powers=document.powers,
    )
    return SolveReport(
        objective=document.objective,
        allocation=allocation,
        algorithm=document.algorithm,
        wall_time=document.wall_time_s,
        instance_digest=document.instance_digest,
        details=document.details or {},
    )
