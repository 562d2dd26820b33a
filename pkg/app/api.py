# app/api.py
from __future__ import annotations

from fastapi import APIRouter, HTTPException, Query

from hecke.dynamics import enumerate_classes, is_symmetric_class
from hecke.errors import HeckeError, SpecError
from hecke.heckealg import generators
from hecke.logs import log_json
from hecke.numberfield import make_context
from hecke.rpf import build, verify
from hecke.serialize import (
    context_to_json,
    cycle_to_json,
    mat2_to_json,
    parse_form,
    ratfunc_from_json,
    ratfunc_to_json,
    report_to_json,
    seed_cycle,
    spec_from_json,
)
from hecke.settings import settings

from .models import BuildIn, VerifyIn

router = APIRouter(prefix="/rpf", tags=["rpf"])

MAX_WORD_LEN = 6


# ======================================================
# Helpers
# ======================================================
def _fail(e: Exception):
    """Errores de entrada -> 422; fallos de cálculo -> 400 con el tipo de error."""
    log_json(evt="api_error", type=type(e).__name__, error=str(e))
    if isinstance(e, SpecError):
        raise HTTPException(status_code=422, detail=str(e))
    raise HTTPException(status_code=400, detail=f"{type(e).__name__}: {e}")


def _ctx(p: int):
    try:
        return make_context(p)
    except HeckeError as e:
        _fail(e)


# ======================================================
# Endpoints
# ======================================================
@router.get("/minpoly/{p}")
def minpoly(p: int):
    return context_to_json(_ctx(p))


@router.get("/generators/{p}")
def group_generators(p: int):
    ctx = _ctx(p)
    S, T, U = generators(ctx)
    return {"p": p, "S": mat2_to_json(S), "T": mat2_to_json(T), "U": mat2_to_json(U)}


@router.get("/cycle")
def cycle(p: int = Query(..., ge=3), form: str = Query(..., description="A,B,C o a0,a1;b0,b1;c0,c1")):
    ctx = _ctx(p)
    try:
        cyc = seed_cycle(ctx, parse_form(ctx, form))
        cyc = cyc.with_symmetry(is_symmetric_class(ctx, cyc.forms[0]))
    except HeckeError as e:
        _fail(e)
    return cycle_to_json(cyc)


@router.get("/classes")
def classes(p: int = Query(..., ge=3), word_len: int = Query(3, ge=1, le=MAX_WORD_LEN)):
    ctx = _ctx(p)
    try:
        found = enumerate_classes(ctx, word_len, settings.CYCLE_MAX_STEPS)
    except HeckeError as e:
        _fail(e)
    return {"p": p, "word_len": word_len, "classes": [cycle_to_json(c) for c in found]}


@router.post("/build")
def build_rpf(body: BuildIn):
    try:
        spec = spec_from_json(body.as_spec())
        q = build(make_context(spec.p), spec)
    except HeckeError as e:
        _fail(e)
    return {"p": spec.p, "k": spec.k, "rpf": ratfunc_to_json(q)}


@router.post("/verify")
def verify_rpf(body: VerifyIn):
    try:
        if body.spec is not None:
            spec = spec_from_json(body.spec.as_spec())
            q = build(make_context(spec.p), spec)
            k, cycles = spec.k, [t.cycle for t in spec.classes]
        elif body.rpf is not None and body.k is not None:
            q = ratfunc_from_json(body.rpf)
            k, cycles = body.k, None
        else:
            raise SpecError("hace falta 'spec' o bien 'rpf' junto con 'k'")
        report = verify(q.ctx, q, k, cycles, numeric_points=body.numeric_check)
    except HeckeError as e:
        _fail(e)
    return report_to_json(report)
