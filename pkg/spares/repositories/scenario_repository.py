# spares/repositories/scenario_repository.py

import json
import hashlib
import logging
from pathlib import Path
from typing import Any, Optional, Union

from pydantic import ValidationError

from spares.schemas import ScenarioFile
from spares.exceptions.custom_exceptions import ScenarioValidationException

logger = logging.getLogger(__name__)

def scenario_hash(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()

def _line_of(text: str, loc: tuple[Union[str, int], ...]) -> Optional[int]:
    """
    Best-effort line of a field path: each key is searched after the previous one.
    Missing keys resolve to the line of their parent.
    """
    pos, found = 0, None
    for part in loc:
        if isinstance(part, int):
            continue
        hit = text.find(f'"{part}"', pos)
        if hit < 0:
            break
        pos, found = hit, hit
    return None if found is None else text.count("\n", 0, found) + 1

class ScenarioRepository:
    """
    Loads scenario files from disk and validates them into ScenarioFile models.
    """
    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self.raw: bytes = b""
        logger.debug("ScenarioRepository initialized.")

    @property
    def hash(self) -> str:
        return scenario_hash(self.raw)

    def load(self) -> ScenarioFile:
        """
        Reads and validates the scenario. Every problem is reported with its
        dotted field path and line number.
        """
        try:
            self.raw = self.path.read_bytes()
        except OSError as exc:
            raise ScenarioValidationException(f"Cannot read scenario file '{self.path}': {exc.strerror}.",
                                              details={"path": str(self.path)}) from exc
        text = self.raw.decode("utf-8", errors="replace")

        try:
            document: Any = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioValidationException(
                f"Scenario file '{self.path}' is not valid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno}).",
                details={"errors": [{"field": None, "line": exc.lineno, "message": exc.msg}]},
            ) from exc

        try:
            scenario = ScenarioFile.model_validate(document)
        except ValidationError as exc:
            errors = [
                {"field": ".".join(str(p) for p in err["loc"]) or None,
                 "line": _line_of(text, tuple(err["loc"])),
                 "message": err["msg"]}
                for err in exc.errors()
            ]
            first = errors[0]
            where = f" at line {first['line']}" if first["line"] else ""
            raise ScenarioValidationException(
                f"Scenario file '{self.path}' failed validation: {first['field'] or '<root>'}: {first['message']}{where}"
                + (f" (+{len(errors) - 1} more)" if len(errors) > 1 else ""),
                details={"errors": errors},
            ) from exc

        logger.info(f"Loaded {scenario.strategy} scenario '{scenario.name or self.path.name}' (sha256 {self.hash[:12]})")
        return scenario
