from pydantic import BaseModel, Field
from typing import List, Optional, Dict, Any
from enum import Enum


class BallModel(BaseModel):
    center: str = Field(..., description="Special point literal of the centre")
    radius: str = Field(..., description="Radius as a p/q string")
    closed: bool = Field(False, description="Whether the ball is the closed ball")

    class Config:
        json_schema_extra = {
            "example": {
                "center": "5",
                "radius": "1/4",
                "closed": True
            }
        }


class CheckReport(BaseModel):
    """Outcome of a validation harness run."""
    check: str
    passed: bool
    level: Optional[int] = None
    witness: List[str] = Field(default_factory=list, description="Literals of the first failing sample")
    message: str = ""
    details: Dict[str, Any] = Field(default_factory=dict)

    class Config:
        json_schema_extra = {
            "example": {
                "check": "compact_name",
                "passed": True,
                "level": 8,
                "witness": [],
                "message": "all probes covered",
                "details": {}
            }
        }


class Verdict(str, Enum):
    BOUNDED = "BOUNDED"
    UNRESOLVED = "UNRESOLVED"
    SPLIT = "SPLIT"
    NONE_FOUND = "NONE_FOUND"
    REFUTED = "REFUTED"
    NOT_REFUTED = "NOT_REFUTED"


class BoundedResult(BaseModel):
    verdict: Verdict
    point: Optional[str] = None
    radius: Optional[str] = None
    steps: int = 0

    class Config:
        json_schema_extra = {
            "example": {
                "verdict": "BOUNDED",
                "point": "0",
                "radius": "1/1",
                "steps": 34
            }
        }


class DeltaBallResult(BaseModel):
    points: List[str] = Field(..., description="Specials within closed delta-distance r of the centre")
    level: int = Field(..., description="Index N of the compact set K_N containing the delta-ball")
    complete: bool = Field(..., description="False when K_N has infinitely many specials and the scan was cut at budget")

    class Config:
        json_schema_extra = {
            "example": {
                "points": ["0", "1"],
                "level": 3,
                "complete": True
            }
        }


class SplitResult(BaseModel):
    verdict: Verdict
    level: Optional[int] = None
    u: List[BallModel] = Field(default_factory=list)
    v: List[BallModel] = Field(default_factory=list)
    separation: Optional[str] = None
    checks: int = 0


class CounterwitnessModel(BaseModel):
    b: BallModel
    d: BallModel
    v: BallModel
    certificate: str = Field(..., description="EXHAUSTIVE or LIPSCHITZ")
    margin: Optional[str] = None


class RefutationReason(str, Enum):
    TRIPLE = "TRIPLE"
    MISSING_INFINITY = "MISSING_INFINITY"
    MISSING_IDENTITY = "MISSING_IDENTITY"


class RefutationResult(BaseModel):
    verdict: Verdict
    reason: Optional[RefutationReason] = None
    triple: Optional[CounterwitnessModel] = None
    precision: Optional[int] = None
    margins: Dict[str, str] = Field(default_factory=dict)
    steps: int = 0

    class Config:
        json_schema_extra = {
            "example": {
                "verdict": "REFUTED",
                "reason": "MISSING_IDENTITY",
                "triple": None,
                "precision": 3,
                "margins": {"identity": "1/8"},
                "steps": 12
            }
        }


class AxiomFailure(BaseModel):
    axiom: str
    witness: List[str]


class AxiomReport(BaseModel):
    instance: str
    depth: int
    passed: bool
    elements: int
    failures: List[AxiomFailure] = Field(default_factory=list)

    class Config:
        json_schema_extra = {
            "example": {
                "instance": "z2",
                "depth": 4,
                "passed": True,
                "elements": 32,
                "failures": []
            }
        }


class IdealKind(str, Enum):
    NOT_IDEAL = "NOT_IDEAL"
    IDEAL = "IDEAL"
    OPEN_SUBGROUP_IDEAL = "OPEN_SUBGROUP_IDEAL"
    CLOSED_SUBGROUP_IDEAL = "CLOSED_SUBGROUP_IDEAL"
    BOTH = "BOTH"


class IdealReport(BaseModel):
    ideal: str
    depth: int
    kind: IdealKind
    witness: List[str] = Field(default_factory=list, description="Coset literals refuting the first failed condition")
    failed_condition: Optional[str] = None
    conditions: Dict[str, bool] = Field(default_factory=dict)
    witnesses: Dict[str, List[str]] = Field(default_factory=dict, description="First witness of every failed condition")


class WitnessRecord(BaseModel):
    requirement: int
    case: int
    x: Optional[str] = None
    y: Optional[str] = None
    b_j: str
    b_k: Optional[str] = None
    n: int
    m: Optional[int] = None
    bezout: Optional[List[int]] = None

    class Config:
        json_schema_extra = {
            "example": {
                "requirement": 0,
                "case": 1,
                "x": "b0",
                "y": "b1",
                "b_j": "b5",
                "b_k": None,
                "n": 16,
                "m": None,
                "bezout": None
            }
        }


class VectorEntry(BaseModel):
    name: str
    oracle: Any
    library: Any
    agree: bool
