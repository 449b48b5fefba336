from pydantic import BaseModel, Field, field_validator, model_validator
from typing import List, Dict, Optional, Any, Literal

import config


class WindowModel(BaseModel):
    """Degree window [lo, hi]."""
    lo: int
    hi: int

    @model_validator(mode="after")
    def check_order(self):
        if self.lo > self.hi:
            raise ValueError(f"window lo {self.lo} exceeds hi {self.hi}")
        return self


class GeneratorAction(BaseModel):
    """Matrix of one algebra generator (by basis label) from degree `source` upward."""
    generator: str
    source: int
    matrix: List[List[int]]


class ModuleDescription(BaseModel):
    """Model for a module description file."""
    kind: Literal["module"] = "module"
    name: str = "M"
    prime: int = 2
    algebra: str
    window: WindowModel
    basis: Dict[int, List[str]]
    actions: List[GeneratorAction] = Field(default_factory=list)
    bounded_below_at: Optional[int] = None
    bounded_above_at: Optional[int] = None

    @model_validator(mode="after")
    def check_basis_in_window(self):
        outside = [d for d in self.basis if d < self.window.lo or d > self.window.hi]
        if outside:
            raise ValueError(f"basis degrees {sorted(outside)} lie outside the window")
        return self


class CoactionComponent(BaseModel):
    """psi from degree `degree` into M^(degree - s) (x) Gamma^s, as nested lists [target][gamma][source]."""
    degree: int
    s: int = Field(..., le=-1)
    tensor: List[List[List[int]]]


class ComoduleDescription(BaseModel):
    """Model for a comodule description file."""
    kind: Literal["comodule"] = "comodule"
    name: str = "M"
    prime: int = 2
    coalgebra: str
    window: WindowModel
    basis: Dict[int, List[str]]
    coaction: List[CoactionComponent] = Field(default_factory=list)
    bounded_above_at: int
    bounded_below_at: Optional[int] = None

    @model_validator(mode="after")
    def check_basis_in_window(self):
        outside = [d for d in self.basis if d < self.window.lo or d > self.window.hi]
        if outside:
            raise ValueError(f"basis degrees {sorted(outside)} lie outside the window")
        return self


class FormulaModel(BaseModel):
    kind: Literal["affine", "exponential"]
    coefficient: int = 1
    offset: int = 0
    base: int = 2


class TailModel(BaseModel):
    kind: Literal["zero", "constant", "shifted_truncation"]
    shift: Optional[FormulaModel] = None
    cut: Optional[FormulaModel] = None


class FamilyDescription(BaseModel):
    """Either explicit members or a builtin uniform family with its horizon."""
    kind: Literal["family"] = "family"
    name: str = "family"
    coalgebra: Optional[str] = None
    members: Optional[List[ComoduleDescription]] = None
    builtin: Optional[str] = None
    horizon: Optional[int] = Field(None, ge=1)
    tail: Optional[TailModel] = None

    @model_validator(mode="after")
    def check_source(self):
        if (self.members is None) == (self.builtin is None):
            raise ValueError("give exactly one of 'members' and 'builtin'")
        if self.members is not None and not self.members:
            raise ValueError("an explicit family needs at least one member")
        return self


class TowerMap(BaseModel):
    """One degree of a structure map M_(i+1) -> M_i."""
    degree: int
    matrix: List[List[int]]


class TowerDescription(BaseModel):
    kind: Literal["tower"] = "tower"
    name: str = "tower"
    members: Optional[List[ComoduleDescription]] = None
    maps: Optional[List[List[TowerMap]]] = None
    builtin: Optional[str] = None
    horizon: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def check_source(self):
        if (self.members is None) == (self.builtin is None):
            raise ValueError("give exactly one of 'members' and 'builtin'")
        if self.members is not None:
            maps = self.maps or []
            if len(maps) != len(self.members) - 1:
                raise ValueError(f"{len(self.members)} members need {len(self.members) - 1} maps, got {len(maps)}")
        return self


class SessionConfig(BaseModel):
    """Session defaults from config.py, overridden by flags or request fields."""
    prime: int = Field(default_factory=lambda: config.PRIME)
    window_lo: int = Field(default_factory=lambda: config.WINDOW_LO)
    window_hi: int = Field(default_factory=lambda: config.WINDOW_HI)
    family_horizon: int = Field(default_factory=lambda: config.FAMILY_HORIZON, ge=1)
    tower_horizon: int = Field(default_factory=lambda: config.TOWER_HORIZON, ge=1)
    ideal_horizon: int = Field(default_factory=lambda: config.IDEAL_HORIZON, ge=1)
    run: int = Field(default_factory=lambda: config.STABILIZATION_RUN, ge=1)
    output_format: str = Field(default_factory=lambda: config.OUTPUT_FORMAT)
    threads: int = Field(default_factory=lambda: config.THREADS, ge=1)

    @field_validator("prime")
    @classmethod
    def check_prime(cls, v):
        if v != 2:
            raise ValueError(f"prime {v} is not supported: the Milnor basis and the Steenrod builtins exist for p = 2 only")
        return v

    @field_validator("output_format")
    @classmethod
    def check_format(cls, v):
        if v not in config.OUTPUT_FORMATS:
            raise ValueError(f"output format must be one of {config.OUTPUT_FORMATS}, got {v!r}")
        return v

    @model_validator(mode="after")
    def check_window(self):
        if self.window_lo > self.window_hi:
            raise ValueError(f"window lo {self.window_lo} exceeds hi {self.window_hi}")
        return self


class TableModel(BaseModel):
    """A titled table with fixed column order."""
    title: str
    columns: List[str]
    rows: List[List[Any]]


class CommandReport(BaseModel):
    """Model for the output of any command."""
    command: str
    subject: str
    status: str = "ok"
    summary: Dict[str, Any] = Field(default_factory=dict)
    tables: List[TableModel] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


class SubjectRequest(BaseModel):
    """A builtin name or an inline description."""
    builtin: Optional[str] = None
    description: Optional[Dict[str, Any]] = None

    @model_validator(mode="after")
    def check_source(self):
        if (self.builtin is None) == (self.description is None):
            raise ValueError("give exactly one of 'builtin' and 'description'")
        return self


class TorsionRequest(SubjectRequest):
    ideal_set: str = "grad"
    horizon: Optional[int] = Field(None, ge=1)


class RationalRequest(SubjectRequest):
    coalgebra: Optional[str] = None


class ExtRequest(BaseModel):
    source: SubjectRequest
    target: SubjectRequest
    max_s: int = Field(2, ge=0)
    degrees: Optional[List[int]] = None


class LocalCohomologyRequest(SubjectRequest):
    n: int = Field(0, ge=0)
    j_max: Optional[int] = Field(None, ge=1)
    degrees: Optional[List[int]] = None
    ideal_set: str = "grad"
