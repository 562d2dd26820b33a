# hecke/cli.py
"""
CLI del toolkit:  python -m hecke.cli <comando> [opciones]   (envoltorio: ./rpf)

  minpoly     polinomio mínimo m_p (coeficientes enteros, grado descendente)
  generators  S, T, U de G_p
  cycle       ciclo Z_A de una forma semilla
  classes     enumeración de clases por palabras U^j T … (varios --p en paralelo)
  build       construye una RPF desde un spec JSON o desde flags
  verify      verificación exacta de las dos relaciones (varios --spec en paralelo)
  audit       auditoría de polos, constantes C_α e invariancia de partes principales

Salidas: --output json (defecto) | latex | text. Diagnósticos por stderr.
Códigos: 0 ok, 1 verificación fallida, 2 error de uso o de cálculo.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Any, List, Optional, Sequence, Tuple

from .batch import run_jobs
from .dynamics import enumerate_classes, is_symmetric_class
from .errors import HeckeError, SpecError
from .heckealg import generators
from .logs import log, log_json
from .numberfield import make_context
from .ratfunc import RatFunc
from .rpf import (
    GENERAL,
    SYMMETRIC,
    ClassTerm,
    RPFSpec,
    build,
    decompose,
    pole_audit,
    pp_invariance,
    verify,
)
from .serialize import (
    audit_to_json,
    bqf_latex,
    context_to_json,
    cycle_to_json,
    decomposition_to_json,
    mat2_to_json,
    nfelem_latex,
    parse_form,
    parse_nfelem,
    ratfunc_from_json,
    ratfunc_latex,
    ratfunc_to_json,
    report_to_json,
    seed_cycle,
    spec_from_json,
    spec_to_json,
)
from .settings import settings


# ================== PARSER ==================
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=["json", "latex", "text"], default="json")
    common.add_argument("--precision", type=int, help="Bits iniciales del oráculo de signo (RPF_PRECISION_BITS)")
    common.add_argument("--max-steps", type=int, help="Tope de pasos en detección de ciclos")
    common.add_argument("--workers", type=int, help="Hilos para trabajos por lotes (RPF_CONCURRENCY)")

    ap = argparse.ArgumentParser(prog="rpf", description="Grupos de Hecke, formas λ_p y funciones de período racionales")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("minpoly", parents=[common], help="Polinomio mínimo de λ_p")
    s.add_argument("--p", type=int, action="append", required=True)

    s = sub.add_parser("generators", parents=[common], help="Generadores S, T, U")
    s.add_argument("--p", type=int, required=True)

    s = sub.add_parser("cycle", parents=[common], help="Ciclo de una forma semilla")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--form", required=True, help="A,B,C  |  a0,a1;b0,b1;c0,c1")

    s = sub.add_parser("classes", parents=[common], help="Enumeración de clases")
    s.add_argument("--p", type=int, action="append", required=True)
    s.add_argument("--word-len", type=int, default=3)

    for name in ("build", "verify", "audit"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--spec", action="append", help="Fichero JSON (RPFSpec o RatFunc); '-' = stdin")
        s.add_argument("--p", type=int)
        s.add_argument("--k", type=int)
        s.add_argument("--form", action="append", help="Forma semilla de una clase (repetible)")
        s.add_argument("--coeff", action="append", help="d_ℓ / C_ℓ de cada --form (defecto 1)")
        s.add_argument("--mode", choices=[SYMMETRIC, GENERAL], default=SYMMETRIC)
        s.add_argument("--c0", default="0")
        s.add_argument("--a0", default="0")
        s.add_argument("--b1", default="0")
        if name == "verify":
            s.add_argument("--numeric-check", type=int, default=0, metavar="N",
                           help="Contraste numérico en N puntos (no altera el veredicto)")
            s.add_argument("--numeric-bits", type=int, metavar="BITS",
                           help="Precisión del contraste numérico (RPF_NUMERIC_BITS)")
    return ap


# ================== ENTRADAS ==================
def _read_json(path: str) -> Any:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise SpecError(f"no se puede leer {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise SpecError(f"JSON inválido en {path}: {e}") from None


def _spec_from_flags(args) -> RPFSpec:
    if args.p is None or args.k is None:
        raise SpecError("sin --spec hacen falta --p y --k")
    ctx = make_context(args.p)
    forms = args.form or []
    coeffs = args.coeff or []
    if coeffs and len(coeffs) != len(forms):
        raise SpecError("--coeff debe repetirse tantas veces como --form")
    classes = []
    for i, text in enumerate(forms):
        cyc = seed_cycle(ctx, parse_form(ctx, text))
        coeff = parse_nfelem(ctx, coeffs[i]) if coeffs else ctx.one()
        classes.append(ClassTerm(cyc, coeff))
    return RPFSpec(p=args.p, k=args.k, classes=classes,
                   c0=parse_nfelem(ctx, args.c0), a0=parse_nfelem(ctx, args.a0),
                   b1=parse_nfelem(ctx, args.b1), mode=args.mode)


def _load_job(args, data: Optional[Any]) -> Tuple[Optional[RPFSpec], RatFunc, int]:
    """(spec o None, q, k) a partir de un JSON de spec/RatFunc o de los flags."""
    if data is None:
        spec = _spec_from_flags(args)
    elif "field" in data:
        q = ratfunc_from_json(data)
        if args.k is None:
            raise SpecError("una RatFunc suelta necesita --k")
        if args.p is not None and args.p != q.ctx.p:
            raise SpecError(f"--p {args.p} no coincide con la función (p={q.ctx.p})")
        return None, q, args.k
    else:
        spec = spec_from_json(data)
    if args.p is not None and args.p != spec.p:
        raise SpecError(f"--p {args.p} no coincide con el spec (p={spec.p})")
    if args.k is not None and args.k != spec.k:
        raise SpecError(f"--k {args.k} no coincide con el spec (k={spec.k})")
    return spec, build(make_context(spec.p), spec), spec.k


def _inputs(args) -> List[Optional[Any]]:
    if args.spec:
        return [_read_json(path) for path in args.spec]
    return [None]


# ================== COMANDOS ==================
def _minpoly_latex(coeffs: Sequence[int]) -> str:
    d = len(coeffs) - 1
    terms = []
    for i, c in enumerate(coeffs):
        e = d - i
        if c == 0:
            continue
        mono = "" if e == 0 else ("x" if e == 1 else f"x^{{{e}}}")
        txt = (("-" if c < 0 else "") + mono) if mono and abs(c) == 1 else f"{c}{mono}"
        terms.append(txt)
    return " + ".join(terms).replace("+ -", "- ")


def cmd_minpoly(args):
    out = [context_to_json(make_context(p)) for p in args.p]
    payload = out[0] if len(out) == 1 else out
    latex = "\n".join(f"m_{{{o['p']}}}(x) = {_minpoly_latex(o['minpoly'])}" for o in out)
    text = "\n".join(f"p={o['p']}: {o['minpoly']}" for o in out)
    return payload, latex, text, 0


def cmd_generators(args):
    ctx = make_context(args.p)
    S, T, U = generators(ctx)
    payload = {"p": ctx.p, "S": mat2_to_json(S), "T": mat2_to_json(T), "U": mat2_to_json(U)}
    latex = "\n".join(
        f"{n} = \\begin{{pmatrix}} {nfelem_latex(M.a)} & {nfelem_latex(M.b)} \\\\ "
        f"{nfelem_latex(M.c)} & {nfelem_latex(M.d)} \\end{{pmatrix}}"
        for n, M in (("S", S), ("T", T), ("U", U))
    )
    text = "\n".join(f"{n} = {M!r}" for n, M in (("S", S), ("T", T), ("U", U)))
    return payload, latex, text, 0


def cmd_cycle(args):
    ctx = make_context(args.p)
    cyc = seed_cycle(ctx, parse_form(ctx, args.form))
    cyc = cyc.with_symmetry(is_symmetric_class(ctx, cyc.forms[0]))
    log_json(evt="cycle_done", p=ctx.p, length=len(cyc), class_tag=cyc.class_tag)
    latex = " \\to ".join(bqf_latex(Q) for Q in cyc.forms)
    text = "\n".join(f"{Q!r}  --n={n}-->" for Q, n in zip(cyc.forms, cyc.exponents))
    return cycle_to_json(cyc), latex, text, 0


def cmd_classes(args):
    def job(p: int):
        return [cycle_to_json(c) for c in enumerate_classes(make_context(p), args.word_len)]

    results = run_jobs(job, args.p, args.workers)
    out = []
    for r in results:
        if not r.ok:
            raise r.error
        out.append({"p": r.key, "word_len": args.word_len, "classes": r.value})
    payload = out[0] if len(out) == 1 else out
    lines = [f"p={o['p']}: {c['class_tag']} len={len(c['forms'])} symmetric={c['symmetric']}"
             for o in out for c in o["classes"]]
    return payload, "\n".join(lines), "\n".join(lines), 0


def cmd_build(args):
    inputs = _inputs(args)
    if len(inputs) != 1:
        raise SpecError("build admite un único --spec")
    spec, q, _ = _load_job(args, inputs[0])
    payload = {"rpf": ratfunc_to_json(q)}
    if spec is not None:
        payload["spec"] = spec_to_json(spec)
    return payload, ratfunc_latex(q), repr(q), 0


def cmd_verify(args):
    inputs = _inputs(args)

    def job(data):
        spec, q, k = _load_job(args, data)
        cycles = [t.cycle for t in spec.classes] if spec else None
        report = verify(q.ctx, q, k, cycles, numeric_points=args.numeric_check,
                        numeric_bits=args.numeric_bits)
        return report

    results = run_jobs(job, inputs, args.workers)
    out, lines, code = [], [], 0
    for i, r in enumerate(results):
        if not r.ok:
            raise r.error
        rep = r.value
        out.append(report_to_json(rep))
        if not rep.passed:
            code = 1
        lines.append(f"[{i}] p={rep.p} k={rep.k} relation1={'ok' if rep.relation1_zero else 'FAIL'} "
                     f"relation2={'ok' if rep.relation2_zero else 'FAIL'} audit={'ok' if rep.audit.ok(rep.k) else 'FAIL'}")
    payload = out[0] if len(out) == 1 else out
    latex = "\n".join(
        f"q + q|T = {ratfunc_latex(rep_r.value.residual1)},\\quad \\sum q|U^i = {ratfunc_latex(rep_r.value.residual2)}"
        for rep_r in results
    )
    return payload, latex, "\n".join(lines), code


def cmd_audit(args):
    inputs = _inputs(args)
    if len(inputs) != 1:
        raise SpecError("audit admite un único --spec")
    spec, q, k = _load_job(args, inputs[0])
    ctx = q.ctx
    cycles = [t.cycle for t in spec.classes] if spec else []
    audit = pole_audit(ctx, q, k, cycles)
    payload = {
        "p": ctx.p,
        "k": k,
        "pole_audit": audit_to_json(audit, k),
        "decomposition": [decomposition_to_json(d) for d in decompose(ctx, q, k, cycles)],
        "pp_invariance": [{"class_tag": c.class_tag, "ok": pp_invariance(ctx, q, k, c)} for c in cycles],
    }
    text = (f"polos={len(audit.poles)} no_reconocidos={len(audit.unrecognized)} "
            f"orden_en_0={audit.zero_pole_order} regular_inf={audit.regular_at_infinity} ok={audit.ok(k)}")
    return payload, text, text, 0


COMMANDS = {
    "minpoly": cmd_minpoly,
    "generators": cmd_generators,
    "cycle": cmd_cycle,
    "classes": cmd_classes,
    "build": cmd_build,
    "verify": cmd_verify,
    "audit": cmd_audit,
}


# ================== ENTRADA ==================
def _apply_overrides(args):
    if args.precision is not None:
        if args.precision < 8:
            raise SpecError("--precision debe ser >= 8")
        settings.PRECISION_BITS = args.precision
    if args.max_steps is not None:
        if args.max_steps < 1:
            raise SpecError("--max-steps debe ser >= 1")
        settings.CYCLE_MAX_STEPS = args.max_steps
    if args.workers is not None and args.workers < 1:
        raise SpecError("--workers debe ser >= 1")
    numeric_bits = getattr(args, "numeric_bits", None)
    if numeric_bits is not None and numeric_bits < 8:
        raise SpecError("--numeric-bits debe ser >= 8")


def run(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        _apply_overrides(args)
        payload, latex, text, code = COMMANDS[args.command](args)
    except SpecError as e:
        log(f"[FATAL] entrada inválida: {e}")
        return 2
    except HeckeError as e:
        log(f"[FATAL] {type(e).__name__}: {e}")
        return 2
    if args.output == "json":
        print(json.dumps(payload, ensure_ascii=False), flush=True)
    elif args.output == "latex":
        print(latex, flush=True)
    else:
        print(text, flush=True)
    return code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
