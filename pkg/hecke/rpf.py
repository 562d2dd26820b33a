# hecke/rpf.py
"""
Funciones de período racionales (RPF) de peso 2k sobre G_p:
construcción (q_{k,0}, suma simétrica con k impar, forma general, suma de
Schmidt), verificación exacta de las dos relaciones y auditoría de polos.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .dynamics import Cycle, cycle_from, is_symmetric_class, reduce_to_cycle
from .errors import (
    AsymmetricClass,
    MalformedCombination,
    PoleProximity,
    SpecError,
)
from .heckealg import (
    BQF,
    act,
    alpha_of,
    generators,
    is_simple,
    negated_class_representative,
    u_power_table,
)
from .logs import log, log_json
from .numberfield import NFContext, NFElem, QElem, interval_context
from .ratfunc import (
    Field,
    Poly,
    PrincipalPart,
    RatFunc,
    eval_interval,
    low_order,
    p_add,
    p_divmod,
    p_mul,
    p_pow,
    p_shift,
    p_strip,
    principal_part,
    q_k_alpha,
    slash,
)
from .settings import settings

SYMMETRIC = "symmetric"
GENERAL = "general"


# ================== TIPOS ==================
@dataclass
class ClassTerm:
    cycle: Cycle
    coeff: object  # d_ℓ (simétrico) o C_ℓ (general); NFElem o QElem


@dataclass
class RPFSpec:
    p: int
    k: int
    classes: List[ClassTerm] = field(default_factory=list)
    c0: object = 0
    a0: object = 0
    b1: object = 0
    cn: Optional[List[object]] = None
    mode: str = SYMMETRIC

    @property
    def L(self) -> int:
        return len(self.classes)


@dataclass
class PoleEntry:
    pole: object
    order: int
    expected_order: int
    real: Optional[bool]


@dataclass
class PoleAudit:
    poles: List[PoleEntry] = field(default_factory=list)
    unrecognized: List[Poly] = field(default_factory=list)
    zero_pole_order: int = 0
    regular_at_infinity: bool = True
    q_infinity: object = None
    qinf_nonzero: bool = False
    hecke_symmetric: bool = True

    @property
    def orders_ok(self) -> bool:
        return all(e.order == e.expected_order and e.real for e in self.poles)

    def zero_order_ok(self, k: int) -> bool:
        return self.zero_pole_order <= 2 * k and ((self.zero_pole_order == 2 * k) == self.qinf_nonzero)

    def ok(self, k: int) -> bool:
        return (self.orders_ok and not self.unrecognized and self.regular_at_infinity
                and self.zero_order_ok(k))


@dataclass
class VerifyReport:
    p: int
    k: int
    relation1_zero: bool
    relation2_zero: bool
    residual1: RatFunc
    residual2: RatFunc
    audit: PoleAudit
    numeric: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return self.relation1_zero and self.relation2_zero

    @property
    def regular_at_infinity(self) -> bool:
        return self.audit.regular_at_infinity

    @property
    def zero_pole_order(self) -> int:
        return self.audit.zero_pole_order

    @property
    def qinf_nonzero(self) -> bool:
        return self.audit.qinf_nonzero


# ================== UTILIDADES ==================
def _structured_sum(F: Field, parts: Sequence[Tuple[Poly, Poly]]) -> Tuple[Poly, Poly]:
    """Σ n_i/d_i con denominadores coprimos: den = Π d_i, num = Σ n_i Π_{j≠i} d_j."""
    one = F.one()
    if not parts:
        return [], [one]
    L = len(parts)
    prefix = [[one]]
    for _, d in parts:
        prefix.append(p_mul(prefix[-1], d))
    suffix = [[one]] * (L + 1)
    for i in range(L - 1, -1, -1):
        suffix[i] = p_mul(parts[i][1], suffix[i + 1])
    num: Poly = []
    for i, (n, _) in enumerate(parts):
        num = p_add(num, p_mul(n, p_mul(prefix[i], suffix[i + 1])))
    return num, prefix[-1]


def _strip_common_z(num: Poly, den: Poly) -> Tuple[Poly, Poly]:
    m = min(low_order(num), low_order(den)) if num else low_order(den)
    return num[m:], den[m:]


def _zero_part_numerator(F: Field, k: int, c0, a0, b1, cn) -> Poly:
    """Numerador N con c0·q_{k,0} + Σ c_n z^{-n} = N / z^{2k}."""
    zero = F.zero()
    out = [zero] * (2 * k + 1)
    ca = F.coerce(c0) * F.coerce(a0)
    out[0] = out[0] - ca
    out[2 * k] = out[2 * k] + ca
    if k == 1:
        out[1] = out[1] + F.coerce(c0) * F.coerce(b1)
    for n, c in enumerate(cn or [], start=1):
        out[2 * k - n] = out[2 * k - n] + F.coerce(c)
    return p_strip(out)


def _with_zero_part(F: Field, num: Poly, den: Poly, k: int, zpoly: Poly) -> RatFunc:
    """num/den + zpoly/z^{2k}, con den(0) != 0: sigue reducida tras quitar z comunes."""
    if not zpoly:
        return RatFunc(F, num, den, reduce=False)
    zero = F.zero()
    total_num = p_add(p_shift(num, 2 * k, zero), p_mul(zpoly, den))
    total_den = p_shift(den, 2 * k, zero)
    total_num, total_den = _strip_common_z(total_num, total_den)
    return RatFunc(F, total_num, total_den, reduce=False)


def _check_cn(k: int, cn) -> Optional[list]:
    if cn is None:
        return None
    if len(cn) > 2 * k - 1:
        raise SpecError(f"cn admite como mucho 2k-1 = {2 * k - 1} coeficientes")
    return list(cn)


# ================== q_{k,0} ==================
def q_k_0(ctx: NFContext, k: int, a0=0, b1=0) -> RatFunc:
    """a0(1 - z^{-2k}), más b1/z cuando 2k = 2."""
    if k < 1:
        raise SpecError("k debe ser >= 1")
    if k != 1 and not ctx.coerce(b1).is_zero():
        raise SpecError("b1 solo se admite con 2k = 2")
    num = _zero_part_numerator(ctx, k, 1, a0, b1, None)
    if not num:
        return RatFunc.zero(ctx)
    num, den = _strip_common_z(num, p_shift([ctx.one()], 2 * k, ctx.zero()))
    return RatFunc(ctx, num, den, reduce=False)


# ================== CONSTRUCCIÓN SIMÉTRICA ==================
def _class_symmetric(ctx: NFContext, cyc: Cycle) -> bool:
    if cyc.symmetric is not None:
        return cyc.symmetric
    return is_symmetric_class(ctx, cyc.forms[0])


def _quadratic_sum(ctx: NFContext, k: int, weighted_forms: Sequence[Tuple[BQF, NFElem]]) -> Tuple[Poly, Poly]:
    """Σ w·Q(z,1)^{-k}, agrupando formas con la misma cuadrática mónica."""
    merged: Dict[tuple, list] = {}
    for Q, w in weighted_forms:
        key = Q.monic_key()
        inv = Q.A.inverse()
        coef = w * inv ** k
        if key in merged:
            merged[key][1] = merged[key][1] + coef
        else:
            merged[key] = [[Q.C * inv, Q.B * inv, ctx.one()], coef]
    parts = [([coef], p_pow(quad, k, ctx.one()))
             for quad, coef in merged.values() if not coef.is_zero()]
    return _structured_sum(ctx, parts)


def build_symmetric(ctx: NFContext, k: int, classes: Sequence[ClassTerm],
                    c0=0, a0=0, b1=0, cn=None) -> RatFunc:
    """q = Σ d_ℓ Σ_{α∈Z_A} Q_α(z,1)^{-k} + c0·q_{k,0}."""
    if k % 2 == 0:
        raise SpecError("la construcción simétrica requiere k impar")
    cn = _check_cn(k, cn)
    if cn and any(not ctx.coerce(c).is_zero() for c in cn):
        log(f"[WARN] cn no nulos en modo simétrico (k={k}); el resultado probablemente no es RPF")
    if k != 1 and not ctx.coerce(b1).is_zero():
        raise SpecError("b1 solo se admite con 2k = 2")
    weighted = []
    for term in classes:
        if not _class_symmetric(ctx, term.cycle):
            raise AsymmetricClass(term.cycle.class_tag)
        d = ctx.coerce(term.coeff)
        weighted.extend((Q, d) for Q in term.cycle.forms)
    num, den = _quadratic_sum(ctx, k, weighted)
    q = _with_zero_part(ctx, num, den, k, _zero_part_numerator(ctx, k, c0, a0, b1, cn))
    log_json(evt="build_done", mode=SYMMETRIC, p=ctx.p, k=k, L=len(classes),
             deg_num=len(q.num) - 1, deg_den=len(q.den) - 1)
    return q


def build_schmidt(ctx: NFContext, k: int, cycle: Cycle, d=1) -> RatFunc:
    """d·Σ_{α ∈ Z_A ∪ Z_{-A}} Q_α(z,1)^{-k}: RPF para cualquier clase si k es impar."""
    if k % 2 == 0:
        raise SpecError("la suma sobre Z_A ∪ Z_{-A} requiere k impar")
    other = cycle_from(ctx, negated_class_representative(cycle.forms[0]))
    forms = {Q.tag(): Q for Q in cycle.forms}
    for Q in other.forms:
        forms.setdefault(Q.tag(), Q)
    dd = ctx.coerce(d)
    num, den = _quadratic_sum(ctx, k, [(Q, dd) for _, Q in sorted(forms.items())])
    return RatFunc(ctx, num, den, reduce=False)


# ================== CONSTRUCCIÓN GENERAL ==================
@dataclass
class GeneralAssembly:
    """Grupos por discriminante (valores en Q(λ_p)(√D)) + parte en 0 sobre la base."""

    groups: List[RatFunc]
    zero_part: RatFunc
    k: int

    def total(self) -> RatFunc:
        """Suma completa; solo representable en un cuerpo si hay a lo sumo un D."""
        if len(self.groups) > 1:
            raise SpecError("varios discriminantes: use build_general")
        if not self.groups:
            return self.zero_part
        return self.groups[0].add(self.zero_part)


def _merge_parts(parts: Sequence[Tuple[QElem, Sequence]]) -> List[PrincipalPart]:
    merged: Dict[QElem, list] = {}
    order: List[QElem] = []
    for pt, coeffs in parts:
        if pt in merged:
            merged[pt] = [x + y for x, y in zip(merged[pt], coeffs)]
        else:
            merged[pt] = list(coeffs)
            order.append(pt)
    out = []
    for pt in order:
        cs = merged[pt]
        while cs and cs[0].is_zero():
            cs = cs[1:]
        if cs:
            out.append(PrincipalPart(pt, tuple(cs)))
    return out


def assemble_general(ctx: NFContext, k: int, classes: Sequence[ClassTerm],
                     c0=0, a0=0, b1=0, cn=None) -> GeneralAssembly:
    """Σ C_ℓ (Σ_{Z_A} q_{k,α} - Σ_{Z_{-A}} q_{k,α'}) por discriminante, sin descender."""
    if k < 1:
        raise SpecError("k debe ser >= 1")
    cn = _check_cn(k, cn)
    if k != 1 and not ctx.coerce(b1).is_zero():
        raise SpecError("b1 solo se admite con 2k = 2")

    by_D: Dict[NFElem, list] = {}
    exts: Dict[NFElem, Field] = {}
    for term in classes:
        cyc = term.cycle
        D = cyc.discriminant
        ext = alpha_of(cyc.forms[0]).ext
        exts.setdefault(D, ext)
        C = ext.coerce(term.coeff)
        if C.is_zero():
            continue
        neg = cycle_from(ctx, negated_class_representative(cyc.forms[0]))
        bucket = by_D.setdefault(D, [])
        for Q in cyc.forms:
            pp = q_k_alpha(ctx, Q, k, "alpha")
            bucket.append((pp.alpha, [C * c for c in pp.coeffs]))
        for Q in neg.forms:
            pp = q_k_alpha(ctx, Q, k, "alpha_prime")
            bucket.append((pp.alpha, [-(C * c) for c in pp.coeffs]))

    groups = []
    for D, bucket in by_D.items():
        ext = exts[D]
        pps = _merge_parts(bucket)
        parts = []
        for pp in pps:
            r = pp.as_ratfunc()
            parts.append((r.num, r.den))
        num, den = _structured_sum(ext, parts)
        groups.append(RatFunc(ext, num, den, reduce=False))

    zpoly = _zero_part_numerator(ctx, k, c0, a0, b1, cn)
    zero_part = _with_zero_part(ctx, [], [ctx.one()], k, zpoly) if zpoly else RatFunc.zero(ctx)
    return GeneralAssembly(groups, zero_part, k)


def build_general(ctx: NFContext, k: int, classes: Sequence[ClassTerm],
                  c0=0, a0=0, b1=0, cn=None) -> RatFunc:
    asm = assemble_general(ctx, k, classes, c0, a0, b1, cn)
    base_groups = []
    for g in asm.groups:
        r = g.descend()
        if r is None:
            raise MalformedCombination(
                f"√({g.D}) no se cancela en la combinación", sqrt_multiple=g.is_pure_sqrt_multiple()
            )
        if not r.is_zero():
            base_groups.append(r)
    if not base_groups:
        q = asm.zero_part
    else:
        S = base_groups[0]
        for r in base_groups[1:]:
            S = S.add(r, reduce=True)
        zpoly = _zero_part_numerator(ctx, k, c0, a0, b1, _check_cn(k, cn))
        q = _with_zero_part(ctx, S.num, S.den, k, zpoly)
    log_json(evt="build_done", mode=GENERAL, p=ctx.p, k=k, L=len(classes),
             deg_num=len(q.num) - 1, deg_den=len(q.den) - 1)
    return q


def build(ctx: NFContext, spec: RPFSpec) -> RatFunc:
    if spec.p != ctx.p:
        raise SpecError(f"spec con p={spec.p} y contexto p={ctx.p}")
    if spec.mode == SYMMETRIC:
        return build_symmetric(ctx, spec.k, spec.classes, spec.c0, spec.a0, spec.b1, spec.cn)
    if spec.mode == GENERAL:
        return build_general(ctx, spec.k, spec.classes, spec.c0, spec.a0, spec.b1, spec.cn)
    raise SpecError(f"modo desconocido: {spec.mode!r}")


# ================== VERIFICACIÓN ==================
def _as_base(q: RatFunc) -> RatFunc:
    r = q.descend()
    if r is None:
        raise SpecError("verify requiere una función sobre Q(λ_p)")
    return r


def relation_residuals(ctx: NFContext, q: RatFunc, k: int) -> Tuple[RatFunc, RatFunc]:
    """(q + q|T, Σ_{i<p} q|U^i) sin normalizar."""
    _, T, _ = generators(ctx)
    r1 = q.add(slash(q, T, k), reduce=False)
    r2 = RatFunc.zero(ctx)
    for i in range(ctx.p):
        r2 = r2.add(slash(q, u_power_table(ctx, i), k), reduce=False)
    return r1, r2


def verify(ctx: NFContext, q: RatFunc, k: int, cycles: Optional[Sequence[Cycle]] = None,
           numeric_points: int = 0, numeric_bits: Optional[int] = None) -> VerifyReport:
    q = _as_base(q)
    r1, r2 = relation_residuals(ctx, q, k)
    ok1, ok2 = r1.is_zero(), r2.is_zero()
    report = VerifyReport(
        p=ctx.p,
        k=k,
        relation1_zero=ok1,
        relation2_zero=ok2,
        residual1=r1 if ok1 else r1.normalized(),
        residual2=r2 if ok2 else r2.normalized(),
        audit=pole_audit(ctx, q, k, cycles),
    )
    if numeric_points:
        report.numeric = numeric_check(ctx, q, k, numeric_points, numeric_bits)
    log_json(evt="verify_done", p=ctx.p, k=k, relation1=ok1, relation2=ok2,
             audit_ok=report.audit.ok(k))
    return report


# ================== AUDITORÍA DE POLOS ==================
def _candidate_forms(ctx: NFContext, cycles: Sequence[Cycle]) -> List[BQF]:
    _, T, _ = generators(ctx)
    out: Dict[tuple, BQF] = {}
    for cyc in cycles:
        for Q in cyc.forms:
            for F in (Q, act(Q, T)):
                out.setdefault(F.monic_key(), F)
    return list(out.values())


def pole_audit(ctx: NFContext, q: RatFunc, k: int,
               cycles: Optional[Sequence[Cycle]] = None) -> PoleAudit:
    audit = PoleAudit()
    if q.is_zero():
        return audit
    q = _as_base(q)
    den = q.den
    audit.zero_pole_order = low_order(den)
    rest = den[audit.zero_pole_order:]

    for Q in _candidate_forms(ctx, cycles or []):
        inv = Q.A.inverse()
        quad = [Q.C * inv, Q.B * inv, ctx.one()]
        mult = 0
        while len(rest) >= 3:
            quo, rem = p_divmod(rest, quad)
            if rem:
                break
            rest, mult = quo, mult + 1
        if mult:
            alpha = alpha_of(Q)
            real = Q.D.sign() == 1
            audit.poles.append(PoleEntry(alpha, mult, k, real))
            audit.poles.append(PoleEntry(alpha.conj(), mult, k, real))

    if len(rest) > 1:
        audit.unrecognized.append(rest)

    qinf = q.at_infinity()
    audit.regular_at_infinity = qinf is not None
    audit.q_infinity = qinf
    audit.qinf_nonzero = qinf is not None and not qinf.is_zero()

    orders = {e.pole: e.order for e in audit.poles}
    audit.hecke_symmetric = all(orders.get(p.conj()) == o for p, o in orders.items())
    return audit


# ================== PARTES PRINCIPALES: ANÁLISIS ==================
@dataclass
class PoleConstant:
    pole: QElem
    constant: object
    proportional: bool
    negative_side: bool


@dataclass
class Decomposition:
    class_tag: str
    C: object
    entries: List[PoleConstant]

    @property
    def alternation_ok(self) -> bool:
        if self.C is None:
            return False
        for e in self.entries:
            expected = -self.C if e.negative_side else self.C
            if not e.proportional or e.constant != expected:
                return False
        return True


def decompose(ctx: NFContext, q: RatFunc, k: int, cycles: Sequence[Cycle]) -> List[Decomposition]:
    """C_α con PP_α[q] = C_α q_{k,α} sobre Z_A ∪ TZ_A de cada ciclo."""
    _, T, _ = generators(ctx)
    out = []
    for cyc in cycles:
        entries = []
        for Q in cyc.forms:
            for negative_side, F in ((False, Q), (True, act(Q, T))):
                canon = q_k_alpha(ctx, F, k, "alpha")
                pp = principal_part(q, canon.alpha)
                if pp.is_empty():
                    entries.append(PoleConstant(canon.alpha, canon.alpha.ext.zero(), True, negative_side))
                    continue
                c = pp.ratio_to(canon)
                entries.append(PoleConstant(canon.alpha, c if c is not None else pp.leading,
                                            c is not None, negative_side))
        C = entries[0].constant if entries else None
        out.append(Decomposition(cyc.class_tag, C, entries))
    return out


def pp_invariance(ctx: NFContext, q: RatFunc, k: int, cycle: Cycle, index: int = 0) -> bool:
    """PP_α[q] = PP_α[PP_α[q] | M⁻¹] con M la matriz que fija α del ciclo."""
    alpha = alpha_of(cycle.forms[index])
    M = cycle.fixing_matrix(index)
    pp = principal_part(q, alpha)
    if pp.is_empty():
        return True
    again = principal_part(slash(pp.as_ratfunc(), M.inverse(), k), alpha)
    return again == pp


def uniqueness_check(ctx: NFContext, k: int, Q: BQF, scalings: Sequence = (1, 7)) -> bool:
    """PP_α de varias RPF con α como polo son múltiplos de q_{k,α}, con la razón esperada."""
    cyc = cycle_from(ctx, Q) if is_simple(Q) else reduce_to_cycle(ctx, Q)
    lead = cyc.forms[0]
    canon = q_k_alpha(ctx, lead, k, "alpha")
    alpha = canon.alpha

    candidates: List[Tuple[object, RatFunc]] = []
    symmetric = k % 2 == 1 and _class_symmetric(ctx, cyc)
    for s in scalings:
        term = [ClassTerm(cyc, s)]
        if symmetric:
            candidates.append((s, build_symmetric(ctx, k, term)))
        for g in assemble_general(ctx, k, term).groups:
            candidates.append((s, g))

    ratios: Dict[str, list] = {}
    for s, q in candidates:
        r = principal_part(q, alpha).ratio_to(canon)
        if r is None or r.is_zero():
            return False
        kind = "sym" if q.is_base() else "gen"
        ratios.setdefault(kind, []).append((s, r))

    base_s = alpha.ext.coerce(scalings[0])
    for pairs in ratios.values():
        s0, r0 = pairs[0]
        for s, r in pairs[1:]:
            if r * base_s != r0 * alpha.ext.coerce(s):
                return False
    return True


# ================== CONTROL NUMÉRICO ==================
def _iv_matrix(M, bits: int):
    return tuple(x.enclosure(bits) for x in M.entries())


def numeric_check(ctx: NFContext, q: RatFunc, k: int, points: int = 20,
                  bits: Optional[int] = None, seed: int = 0, tol: Optional[float] = None) -> dict:
    """
    Evalúa q + q|T y Σ q|U^i en puntos complejos aleatorios del semiplano
    superior con intervalos, sin pasar por el slash simbólico.
    """
    bits = bits or settings.NUMERIC_BITS
    # tolerancia ligada a la precisión: 2^(-2·bits/3), ~1e-40 con 200 bits
    tol = tol if tol is not None else 2.0 ** -(2 * bits // 3)
    rng = random.Random(seed)
    _, T, _ = generators(ctx)
    mats = [u_power_table(ctx, i) for i in range(ctx.p)]
    worst = 0.0
    skipped = 0
    for _ in range(points):
        z0 = complex(rng.uniform(-3, 3), rng.uniform(0.125, 3))
        iv = interval_context(bits)
        z = iv.mpc(z0.real, z0.imag)

        def slashed(M):
            a, b, c, d = _iv_matrix(M, bits)
            j = c * z + d
            jk = iv.mpc(1, 0)
            for _ in range(2 * k):
                jk = jk * j
            return eval_interval(q, (a * z + b) / j, bits) / jk

        try:
            r1 = eval_interval(q, z, bits) + slashed(T)
            r2 = iv.mpc(0, 0)
            for M in mats:
                r2 = r2 + slashed(M)
        except PoleProximity:
            skipped += 1
            continue
        worst = max(worst, float(abs(r1).b), float(abs(r2).b))
    ok = worst < tol and skipped < points
    log_json(evt="numeric_check", p=ctx.p, k=k, points=points, skipped=skipped,
             worst=worst, bits=bits, ok=ok)
    return {"points": points, "skipped": skipped, "bits": bits, "max_residual": worst,
            "tolerance": tol, "ok": ok}
