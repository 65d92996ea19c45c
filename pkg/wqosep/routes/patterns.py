from fastapi import APIRouter

from ..automata import build_md
from ..ideals import pattern_irreducible
from ..patterns import kappa, parse_pattern, period
from ..schemas import BoolResponse, KappaRequest, KappaResponse, PatternRequest
from .orders import word

router = APIRouter(prefix="/patterns", tags=["Patterns"])


@router.post("/kappa", response_model=KappaResponse)
def kappa_profile(req: KappaRequest):
    w = word(req.word)
    return KappaResponse(d=req.d, profile=kappa(req.d, w).as_dict(), period=period(req.d, w))


@router.post("/period")
def loop_period(req: KappaRequest):
    return {"d": req.d, "period": period(req.d, word(req.word))}


@router.post("/irreducible", response_model=BoolResponse)
def irreducible(req: PatternRequest):
    p = parse_pattern(req.pattern, build_md(req.d, req.alphabet))
    return BoolResponse(result=pattern_irreducible(p))
