from fastapi import APIRouter

from .. import config
from ..formats import automaton_model
from ..orders import order_leq, parse_order, upward_closure_word
from ..schemas import BoolResponse, ClosureResponse, CompareRequest, WordClosureRequest

router = APIRouter(prefix="/orders", tags=["Orders"])


def word(text: str) -> tuple:
    return () if text in ("", "ε") else tuple(text)


@router.post("/compare", response_model=BoolResponse)
def compare(req: CompareRequest):
    o = parse_order(req.order, req.alphabet, base_dir=config.DATA_DIR)
    return BoolResponse(result=order_leq(o, word(req.u), word(req.v)))


@router.post("/up-word", response_model=ClosureResponse, response_model_by_alias=True)
def up_word(req: WordClosureRequest):
    o = parse_order(req.order, req.alphabet, base_dir=config.DATA_DIR)
    return ClosureResponse(order=req.order, automaton=automaton_model(upward_closure_word(o, word(req.word))))
