from pydantic import BaseModel, Field, field_validator
from typing import List, Optional, Dict, Any


class CommandInvocation(BaseModel):
    subcommand: str = Field(..., description="Command path, e.g. 'chabauty refute'")
    instance: Optional[str] = Field(None, description="Registry key of the instance")
    parameters: Dict[str, Any] = Field(default_factory=dict)
    precision: Optional[int] = None
    budget: Optional[int] = None
    output: Optional[str] = Field(None, description="Trace output path")

    @field_validator("precision", "budget")
    @classmethod
    def positive(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value <= 0:
            raise ValueError("must be positive")
        return value

    class Config:
        json_schema_extra = {
            "example": {
                "subcommand": "chabauty refute",
                "instance": "discrete-z",
                "parameters": {"set": "0,1,inf"},
                "precision": None,
                "budget": 100000,
                "output": "out.json"
            }
        }


class TraceDocument(BaseModel):
    schema_version: str
    command: CommandInvocation
    seed: int
    steps: List[Dict[str, Any]] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)

    class Config:
        json_schema_extra = {
            "example": {
                "schema_version": "1",
                "command": {"subcommand": "group check", "instance": "z2"},
                "seed": 20240607,
                "steps": [],
                "summary": {"passed": True}
            }
        }


class ErrorDocument(BaseModel):
    error: str
    message: str
    details: Dict[str, Any] = Field(default_factory=dict)

    class Config:
        json_schema_extra = {
            "example": {
                "error": "PROMISE_VIOLATION",
                "message": "z2 is compact; the one-point compactification needs a non-compact base",
                "details": {"instance": "z2"}
            }
        }
