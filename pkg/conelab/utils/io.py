"""
JSON file I/O for matrices, cone maps and reports.

Every artifact goes through its pydantic model, so a malformed file surfaces as
an ``InputError`` naming the file and the offending field.
"""

import json
import logging
from pathlib import Path
from typing import TypeVar

from pydantic import BaseModel, ValidationError

from conelab.jordan import HermitianMatrix
from conelab.linmap import ConeMap
from conelab.models import ConeMapPayload, InputError, MatrixPayload

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)


def read_model(path: str | Path, model: type[ModelT]) -> ModelT:
    """
    Read and validate one JSON document.

    Args:
        path: File to read
        model: Pydantic model the document must match

    Returns:
        The validated model instance

    Raises:
        InputError: If the file is missing, is not JSON, or fails validation
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        logger.error(f"Cannot read {path}: {e}")
        raise InputError(f"Cannot read {path}: {e}") from e
    try:
        return model.model_validate_json(text)
    except ValidationError as e:
        logger.error(f"Malformed {model.__name__} in {path}: {e}")
        raise InputError(f"Malformed {model.__name__} in {path}: {e}") from e


def load_matrix(path: str | Path) -> HermitianMatrix:
    payload = read_model(path, MatrixPayload)
    try:
        return HermitianMatrix.from_payload(payload)
    except ValueError as e:
        raise InputError(f"{path} does not hold a hermitian matrix: {e}") from e


def load_cone_map(path: str | Path) -> ConeMap:
    payload = read_model(path, ConeMapPayload)
    try:
        return ConeMap.from_payload(payload)
    except ValueError as e:
        raise InputError(f"{path} does not hold a cone map: {e}") from e


def dump_json(model: BaseModel) -> str:
    """Deterministic JSON: aliases applied, keys sorted."""
    data = model.model_dump(mode="json", by_alias=True)
    return json.dumps(data, sort_keys=True, indent=2)


def write_json(model: BaseModel, path: str | Path) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dump_json(model) + "\n", encoding="utf-8")
    except OSError as e:
        logger.error(f"Cannot write {path}: {e}")
        raise InputError(f"Cannot write {path}: {e}") from e
    logger.info(f"Wrote {path}")
