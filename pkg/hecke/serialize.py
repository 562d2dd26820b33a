# hecke/serialize.py
"""
Codecs JSON de todos los tipos del paquete, gramática de coeficientes de la
CLI y renderizado LaTeX.

  NFElem   -> ["n/d", ...] little-endian en potencias de λ_p
  QElem    -> {"u": NFElem, "v": NFElem, "D": NFElem}
  BQF      -> {"A", "B", "C", "D"}
  Mat2     -> {"a", "b", "c", "d", "word"}
  Cycle    -> {"class_tag", "discriminant", "forms", "exponents", "pole_steps", "symmetric"}
  RatFunc  -> {"field": {"p", "D"}, "num": [...], "den": [...]} ascendente en z
"""
from __future__ import annotations

from typing import Any, Dict, List

from .dynamics import Cycle, cycle_from, reduce_to_cycle
from .errors import SpecError
from .heckealg import BQF, INFINITY, Mat2, is_simple, make_bqf
from .numberfield import (
    NFContext,
    NFElem,
    QElem,
    make_context,
    quadratic_extension,
    rational_str,
    to_rational,
)
from .ratfunc import RatFunc
from .rpf import (
    GENERAL,
    SYMMETRIC,
    ClassTerm,
    Decomposition,
    PoleAudit,
    RPFSpec,
    VerifyReport,
)


# ================== CUERPO ==================
def context_to_json(ctx: NFContext) -> Dict[str, Any]:
    return {"p": ctx.p, "minpoly": list(ctx.minpoly)}


def nfelem_to_json(x: NFElem) -> List[str]:
    return [rational_str(c) for c in x.coeffs]


def nfelem_from_json(ctx: NFContext, data) -> NFElem:
    if isinstance(data, (int, str)):
        return ctx.coerce(data)
    if not isinstance(data, list):
        raise SpecError(f"NFElem inválido: {data!r}")
    return ctx.element(data)


def qelem_to_json(x: QElem) -> Dict[str, Any]:
    return {"u": nfelem_to_json(x.u), "v": nfelem_to_json(x.v), "D": nfelem_to_json(x.ext.D)}


def qelem_from_json(ctx: NFContext, data: Dict[str, Any]) -> QElem:
    try:
        ext = quadratic_extension(nfelem_from_json(ctx, data["D"]))
        return QElem(ext, nfelem_from_json(ctx, data["u"]), nfelem_from_json(ctx, data.get("v", [])))
    except KeyError as e:
        raise SpecError(f"QElem sin campo {e}") from None


def scalar_from_json(ctx: NFContext, data):
    """NFElem o, si trae D, QElem."""
    if isinstance(data, dict):
        return qelem_from_json(ctx, data)
    return nfelem_from_json(ctx, data)


def scalar_to_json(x):
    return qelem_to_json(x) if isinstance(x, QElem) else nfelem_to_json(x)


def point_to_json(x):
    if x is INFINITY:
        return "infinity"
    return scalar_to_json(x)


# ================== GRUPO Y FORMAS ==================
def mat2_to_json(M: Mat2) -> Dict[str, Any]:
    out = {k: nfelem_to_json(v) for k, v in zip("abcd", M.entries())}
    out["word"] = M.word
    return out


def bqf_to_json(Q: BQF) -> Dict[str, Any]:
    return {"A": nfelem_to_json(Q.A), "B": nfelem_to_json(Q.B),
            "C": nfelem_to_json(Q.C), "D": nfelem_to_json(Q.D)}


def bqf_from_json(ctx: NFContext, data) -> BQF:
    if isinstance(data, list) and len(data) == 3:
        return make_bqf(ctx, *(nfelem_from_json(ctx, x) for x in data))
    try:
        Q = make_bqf(ctx, *(nfelem_from_json(ctx, data[k]) for k in "ABC"))
    except (KeyError, TypeError) as e:
        raise SpecError(f"BQF inválida: {data!r}") from e
    if "D" in data and nfelem_from_json(ctx, data["D"]) != Q.D:
        raise SpecError("el discriminante declarado no coincide con B²-4AC")
    return Q


def cycle_to_json(c: Cycle) -> Dict[str, Any]:
    return {
        "class_tag": c.class_tag,
        "discriminant": nfelem_to_json(c.discriminant),
        "forms": [bqf_to_json(Q) for Q in c.forms],
        "exponents": list(c.exponents),
        "pole_steps": list(c.pole_steps),
        "symmetric": c.symmetric,
    }


def cycle_from_json(ctx: NFContext, data: Dict[str, Any]) -> Cycle:
    """Recalcula el ciclo desde la primera forma; el resto se contrasta."""
    forms = data.get("forms") or []
    if not forms:
        raise SpecError("ciclo sin formas")
    cyc = seed_cycle(ctx, bqf_from_json(ctx, forms[0]))
    tag = data.get("class_tag")
    if tag is not None and tag != cyc.class_tag:
        raise SpecError(f"class_tag declarado {tag} no coincide con el calculado {cyc.class_tag}")
    if data.get("symmetric") is not None:
        cyc = cyc.with_symmetry(bool(data["symmetric"]))
    return cyc


def seed_cycle(ctx: NFContext, Q: BQF) -> Cycle:
    return cycle_from(ctx, Q) if is_simple(Q) else reduce_to_cycle(ctx, Q)


# ================== FUNCIONES RACIONALES ==================
def ratfunc_to_json(f: RatFunc) -> Dict[str, Any]:
    D = f.D
    if D is None:
        enc = nfelem_to_json
    else:
        def enc(c: QElem):
            return {"u": nfelem_to_json(c.u), "v": nfelem_to_json(c.v)}
    return {
        "field": {"p": f.ctx.p, "D": nfelem_to_json(D) if D is not None else None},
        "num": [enc(c) for c in f.num],
        "den": [enc(c) for c in f.den],
    }


def ratfunc_from_json(data: Dict[str, Any], reduce: bool = True) -> RatFunc:
    try:
        fld = data["field"]
        ctx = make_context(int(fld["p"]))
        num, den = data["num"], data["den"]
    except (KeyError, TypeError, ValueError) as e:
        raise SpecError(f"RatFunc inválida: {e}") from None
    if fld.get("D") is None:
        return RatFunc(ctx, [nfelem_from_json(ctx, c) for c in num],
                       [nfelem_from_json(ctx, c) for c in den], reduce=reduce)
    ext = quadratic_extension(nfelem_from_json(ctx, fld["D"]))

    def dec(c):
        if isinstance(c, dict):
            return QElem(ext, nfelem_from_json(ctx, c["u"]), nfelem_from_json(ctx, c.get("v", [])))
        return ext.coerce(nfelem_from_json(ctx, c))

    return RatFunc(ext, [dec(c) for c in num], [dec(c) for c in den], reduce=reduce)


# ================== RPF ==================
def spec_from_json(data: Dict[str, Any]) -> RPFSpec:
    """
    {"p", "k", "mode", "classes": [{"form"|"cycle", "coeff"}], "c0", "a0", "b1", "cn"}.
    Cada clase se da por una forma semilla (simple o no) o por un ciclo serializado.
    """
    try:
        p, k = int(data["p"]), int(data["k"])
    except (KeyError, TypeError, ValueError) as e:
        raise SpecError(f"spec sin p/k válidos: {e}") from None
    mode = data.get("mode", SYMMETRIC)
    if mode not in (SYMMETRIC, GENERAL):
        raise SpecError(f"modo desconocido: {mode!r}")
    ctx = make_context(p)
    classes = []
    for item in data.get("classes", []):
        if "cycle" in item:
            cyc = cycle_from_json(ctx, item["cycle"])
        elif "form" in item:
            cyc = seed_cycle(ctx, bqf_from_json(ctx, item["form"]))
        else:
            raise SpecError(f"clase sin 'form' ni 'cycle': {item!r}")
        classes.append(ClassTerm(cyc, scalar_from_json(ctx, item.get("coeff", 1))))
    cn = data.get("cn")
    return RPFSpec(
        p=p,
        k=k,
        classes=classes,
        c0=nfelem_from_json(ctx, data.get("c0", 0)),
        a0=nfelem_from_json(ctx, data.get("a0", 0)),
        b1=nfelem_from_json(ctx, data.get("b1", 0)),
        cn=[nfelem_from_json(ctx, c) for c in cn] if cn is not None else None,
        mode=mode,
    )


def spec_to_json(spec: RPFSpec) -> Dict[str, Any]:
    out = {
        "p": spec.p,
        "k": spec.k,
        "mode": spec.mode,
        "classes": [{"cycle": cycle_to_json(t.cycle), "coeff": scalar_to_json(t.coeff)}
                    for t in spec.classes],
        "c0": nfelem_to_json(spec.c0),
        "a0": nfelem_to_json(spec.a0),
        "b1": nfelem_to_json(spec.b1),
    }
    if spec.cn is not None:
        out["cn"] = [nfelem_to_json(c) for c in spec.cn]
    return out


def audit_to_json(a: PoleAudit, k: int) -> Dict[str, Any]:
    return {
        "poles": [{"pole": point_to_json(e.pole), "order": e.order,
                   "expected_order": e.expected_order, "real": e.real} for e in a.poles],
        "unrecognized": [[nfelem_to_json(c) for c in f] for f in a.unrecognized],
        "regular_at_infinity": a.regular_at_infinity,
        "zero_pole_order": a.zero_pole_order,
        "q_infinity": nfelem_to_json(a.q_infinity) if a.q_infinity is not None else None,
        "qinf_nonzero": a.qinf_nonzero,
        "hecke_symmetric": a.hecke_symmetric,
        "ok": a.ok(k),
    }


def report_to_json(r: VerifyReport) -> Dict[str, Any]:
    return {
        "p": r.p,
        "k": r.k,
        "passed": r.passed,
        "relation1_zero": r.relation1_zero,
        "relation2_zero": r.relation2_zero,
        "residual1": ratfunc_to_json(r.residual1),
        "residual2": ratfunc_to_json(r.residual2),
        "pole_audit": audit_to_json(r.audit, r.k),
        "regular_at_infinity": r.regular_at_infinity,
        "zero_pole_order": r.zero_pole_order,
        "qinf_nonzero": r.qinf_nonzero,
        "numeric": r.numeric,
    }


def decomposition_to_json(d: Decomposition) -> Dict[str, Any]:
    return {
        "class_tag": d.class_tag,
        "C": scalar_to_json(d.C) if d.C is not None else None,
        "alternation_ok": d.alternation_ok,
        "poles": [{"pole": point_to_json(e.pole), "C": scalar_to_json(e.constant),
                   "proportional": e.proportional, "negative_side": e.negative_side}
                  for e in d.entries],
    }


# ================== GRAMÁTICA CLI ==================
def parse_nfelem(ctx: NFContext, text: str) -> NFElem:
    """'a0,a1,...' little-endian en λ; cada a_i entero o n/d."""
    parts = [t for t in text.replace(" ", "").split(",") if t != ""]
    if not parts:
        raise SpecError(f"elemento vacío: {text!r}")
    if len(parts) > ctx.degree:
        raise SpecError(f"{text!r}: más de {ctx.degree} coeficientes para p={ctx.p}")
    return ctx.element([to_rational(t) for t in parts])


def parse_form(ctx: NFContext, text: str) -> BQF:
    """
    Forma [A,B,C]:
      - 'A;B;C' con cada parte en la gramática de parse_nfelem, o
      - lista plana de 3 racionales, o de 3·grado racionales (A, B, C seguidos).
    """
    if ";" in text:
        chunks = text.split(";")
        if len(chunks) != 3:
            raise SpecError(f"forma con {len(chunks)} partes: {text!r}")
        return BQF(*(parse_nfelem(ctx, c) for c in chunks))
    parts = [t for t in text.replace(" ", "").split(",") if t != ""]
    vals = [to_rational(t) for t in parts]
    if len(vals) == 3:
        return make_bqf(ctx, *vals)
    d = ctx.degree
    if len(vals) == 3 * d:
        return BQF(*(ctx.element(vals[i * d:(i + 1) * d]) for i in range(3)))
    raise SpecError(f"forma {text!r}: se esperaban 3 o {3 * d} coeficientes")


# ================== LATEX ==================
def _rat_latex(c) -> str:
    n, d = int(c.numerator), int(c.denominator)
    if d == 1:
        return str(n)
    sign = "-" if n < 0 else ""
    return f"{sign}\\frac{{{abs(n)}}}{{{d}}}"


def nfelem_latex(x: NFElem) -> str:
    terms = []
    for i, c in enumerate(x.coeffs):
        if not c:
            continue
        mono = "" if i == 0 else ("\\lambda" if i == 1 else f"\\lambda^{{{i}}}")
        if mono and c == 1:
            txt = mono
        elif mono and c == -1:
            txt = "-" + mono
        else:
            txt = _rat_latex(c) + (" " + mono if mono else "")
        terms.append(txt)
    if not terms:
        return "0"
    return " + ".join(terms).replace("+ -", "- ")


def qelem_latex(x: QElem) -> str:
    if x.v.is_zero():
        return nfelem_latex(x.u)
    root = f"\\sqrt{{{nfelem_latex(x.ext.D)}}}"
    v = f"\\left({nfelem_latex(x.v)}\\right)" if len([c for c in x.v.coeffs if c]) > 1 else nfelem_latex(x.v)
    if v == "1":
        v = ""
    elif v == "-1":
        v = "-"
    if x.u.is_zero():
        return f"{v}{root}"
    return f"{nfelem_latex(x.u)} + {v}{root}".replace("+ -", "- ")


def scalar_latex(x) -> str:
    return qelem_latex(x) if isinstance(x, QElem) else nfelem_latex(x)


def bqf_latex(Q: BQF) -> str:
    return f"[{nfelem_latex(Q.A)},\\ {nfelem_latex(Q.B)},\\ {nfelem_latex(Q.C)}]"


def _poly_latex(coeffs) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c.is_zero():
            continue
        mono = "" if i == 0 else ("z" if i == 1 else f"z^{{{i}}}")
        cl = scalar_latex(c)
        if mono:
            if cl == "1":
                cl = ""
            elif cl == "-1":
                cl = "-"
            elif " " in cl.strip("-") or "+" in cl:
                cl = f"\\left({cl}\\right)"
        terms.append(f"{cl}{mono}" if mono else cl)
    if not terms:
        return "0"
    return " + ".join(terms).replace("+ -", "- ")


def ratfunc_latex(f: RatFunc) -> str:
    num = _poly_latex(f.num)
    if len(f.den) == 1:
        return num
    return f"\\frac{{{num}}}{{{_poly_latex(f.den)}}}"
