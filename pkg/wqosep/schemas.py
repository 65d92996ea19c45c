from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field


# ─── Automaton files ──────────────────────────────────────────────────────────

class EdgeModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    source: str = Field(..., alias="from")
    label: str = Field("", max_length=1)
    target: str = Field(..., alias="to")
    inc: Optional[Dict[str, int]] = None


class AutomatonModel(BaseModel):
    states: List[str]
    alphabet: List[str] = Field(..., min_length=1)
    edges: List[EdgeModel] = []
    initial: List[str]
    final: List[str]
    counters: Optional[List[str]] = None
    final_inc: Optional[Dict[str, Dict[str, int]]] = None


class TransducerEdgeModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    source: str = Field(..., alias="from")
    label: str = Field(..., min_length=1, max_length=1)
    target: str = Field(..., alias="to")
    output: str = ""


class TransducerModel(BaseModel):
    states: List[str]
    input_alphabet: List[str] = Field(..., min_length=1)
    output_alphabet: List[str] = Field(..., min_length=1)
    initial: str
    edges: List[TransducerEdgeModel]
    final_output: Dict[str, str] = {}


class MonoidModel(BaseModel):
    elements: List[str] = Field(..., min_length=1)
    identity: str
    table: Dict[str, Dict[str, str]]
    theta: Dict[str, str]


# ─── Requests ─────────────────────────────────────────────────────────────────

class CompareRequest(BaseModel):
    order: str = Field(..., examples=["mod:2"])
    alphabet: List[str] = Field(..., min_length=1)
    u: str
    v: str


class WordClosureRequest(BaseModel):
    order: str
    alphabet: List[str] = Field(..., min_length=1)
    word: str


class ClosureRequest(BaseModel):
    order: str
    automaton: AutomatonModel


class KappaRequest(BaseModel):
    d: int = Field(..., gt=0)
    word: str


class PatternRequest(BaseModel):
    pattern: str = Field(..., examples=["a (abba)"])
    d: int = Field(..., gt=0)
    alphabet: List[str] = Field(..., min_length=1)


class SeparateRequest(BaseModel):
    order: str = "subword"
    left: AutomatonModel
    right: AutomatonModel
    budget: Optional[int] = Field(None, ge=0)


class ModSeparateRequest(BaseModel):
    left: AutomatonModel
    right: AutomatonModel
    d: Optional[int] = Field(None, gt=0)
    max_d: Optional[int] = Field(None, gt=0)
    budget: Optional[int] = Field(None, ge=0)


# ─── Verdicts ─────────────────────────────────────────────────────────────────

class FormulaModel(BaseModel):
    op: Literal["atom", "not", "and", "or"]
    word: Optional[str] = None
    component: Optional[int] = None
    args: List["FormulaModel"] = []


class VerdictModel(BaseModel):
    verdict: Literal["separable", "inseparable", "inconclusive"]
    order: str
    formula: Optional[FormulaModel] = None
    formula_text: Optional[str] = None
    separator: Optional[AutomatonModel] = None
    certificate: Optional[str] = None
    witness: Optional[str] = None
    budget: Optional[int] = None
    d_used: Optional[int] = None
    definitive: Optional[bool] = None
    reason: Optional[str] = None


class ClosureResponse(BaseModel):
    order: str
    automaton: AutomatonModel


class KappaResponse(BaseModel):
    d: int
    profile: Dict[int, List[str]]
    period: int


class BoolResponse(BaseModel):
    result: bool


FormulaModel.model_rebuild()
VerdictModel.model_rebuild()

AnyFile = Union[AutomatonModel, TransducerModel, MonoidModel]
