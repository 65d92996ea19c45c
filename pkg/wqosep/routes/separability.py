from fastapi import APIRouter, HTTPException

from .. import config
from ..formats import nfa_from_model
from ..orders import parse_order
from ..schemas import ModSeparateRequest, SeparateRequest, VerdictModel
from ..separability import mod_bound, mod_separate, mod_separate_fixed, ptl_separate, verdict_model

router = APIRouter(prefix="/separability", tags=["Separability"])

MAX_BOUND_M = 3


@router.post("/ptl", response_model=VerdictModel, response_model_exclude_none=True, response_model_by_alias=True)
def separate(req: SeparateRequest):
    k, l = nfa_from_model(req.left), nfa_from_model(req.right)
    o = parse_order(req.order, k.alphabet, base_dir=config.DATA_DIR)
    return verdict_model(ptl_separate(o, k, l, req.budget))


@router.post("/mod", response_model=VerdictModel, response_model_exclude_none=True, response_model_by_alias=True)
def separate_mod(req: ModSeparateRequest):
    k, l = nfa_from_model(req.left), nfa_from_model(req.right)
    if req.d is not None:
        return verdict_model(mod_separate_fixed(req.d, k, l, req.budget))
    return verdict_model(mod_separate(k, l, req.max_d, req.budget))


@router.get("/mod-bound/{m}")
def bound(m: int):
    if not 1 <= m <= MAX_BOUND_M:
        raise HTTPException(status_code=400, detail=f"m must be between 1 and {MAX_BOUND_M}")
    return {"m": m, "d": mod_bound(m)}
