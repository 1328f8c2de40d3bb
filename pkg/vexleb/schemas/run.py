from pathlib import Path
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, field_validator

from vexleb.core.errors import UsageError

COMMANDS = ("norm", "transform", "check", "estimate", "blowup", "embed", "verify")


class RunConfig(BaseModel):
    """One CLI invocation, validated before any compute starts."""

    command: str
    inputs: Dict[str, str] = {}
    params: Dict[str, Any] = {}
    output: Optional[str] = None
    fmt: Literal['json', 'csv'] = 'json'
    seed: int = 0

    @field_validator('command')
    @classmethod
    def validate_command(cls, v):
        if v not in COMMANDS:
            raise UsageError(f"Unknown command '{v}'; valid commands: {', '.join(COMMANDS)}")
        return v

    @field_validator('inputs')
    @classmethod
    def validate_inputs(cls, v):
        missing = [f"{name}={path}" for name, path in v.items() if not Path(path).is_file()]
        if missing:
            raise UsageError(f"Input files not found: {', '.join(missing)}")
        return v

    @field_validator('seed')
    @classmethod
    def validate_seed(cls, v):
        if v < 0:
            raise UsageError(f"Seed must be non-negative, got {v}")
        return v
