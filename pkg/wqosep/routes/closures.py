from typing import List, Optional

from fastapi import APIRouter, Query

from .. import config
from ..closures import downward_closure, upward_closure
from ..formats import automaton_model, nfa_from_model
from ..ideals import ideal_decompose, ideal_text
from ..orders import parse_order
from ..schemas import ClosureRequest, ClosureResponse

router = APIRouter(prefix="/closures", tags=["Closures"])


def _load(req: ClosureRequest):
    l = nfa_from_model(req.automaton)
    return parse_order(req.order, l.alphabet, base_dir=config.DATA_DIR), l


@router.post("/down", response_model=ClosureResponse, response_model_by_alias=True)
def down(req: ClosureRequest, budget: Optional[int] = Query(None, ge=0)):
    o, l = _load(req)
    return ClosureResponse(order=req.order, automaton=automaton_model(downward_closure(o, l, budget)))


@router.post("/up", response_model=ClosureResponse, response_model_by_alias=True)
def up(req: ClosureRequest):
    o, l = _load(req)
    return ClosureResponse(order=req.order, automaton=automaton_model(upward_closure(o, l)))


@router.post("/ideals", response_model=List[str])
def ideals(req: ClosureRequest, budget: Optional[int] = Query(None, ge=0)):
    o, l = _load(req)
    return [ideal_text(i) for i in ideal_decompose(o, downward_closure(o, l, budget), check_bound=0)]
