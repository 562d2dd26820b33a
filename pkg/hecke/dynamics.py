# hecke/dynamics.py
"""
Dinámica de Φ_p sobre números hiperbólicos positivos:
  - phi / phi_on_form: rama única n con TU^n x > 0
  - cycle_from / reduce_to_cycle: ciclo Z_A de formas simples
  - irreducible_pole_set: Z_A ∪ TZ_A
  - is_symmetric_class / enumerate_classes
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .errors import CycleLimitExceeded, InvariantViolation, NotSimple, SpecError
from .heckealg import (
    BQF,
    HYPERBOLIC,
    INFINITY,
    Mat2,
    Point,
    act,
    alpha_of,
    branch_matrices,
    classify,
    form_from_matrix,
    generators,
    hecke_conjugate,
    is_simple,
    mobius,
    negated_class_representative,
    u_power_table,
)
from .logs import log_json
from .numberfield import NFContext, NFElem, QElem, field_sign
from .settings import settings


@dataclass(frozen=True)
class Cycle:
    forms: Tuple[BQF, ...]
    # exponents[i] = n con Q_{i+1} = phi_on_form(Q_i), es decir α_{i+1} = TU^n α_i
    exponents: Tuple[int, ...]
    class_tag: str
    symmetric: Optional[bool] = field(default=None, compare=False)

    @property
    def ctx(self) -> NFContext:
        return self.forms[0].ctx

    @property
    def discriminant(self) -> NFElem:
        return self.forms[0].D

    def __len__(self) -> int:
        return len(self.forms)

    @property
    def pole_steps(self) -> Tuple[int, ...]:
        """j = p - n: α_i = U^j T α_{i+1} (proyectivamente); el ciclo recorrido al revés."""
        p = self.ctx.p
        return tuple(p - n for n in self.exponents)

    def alphas(self) -> List[QElem]:
        return [alpha_of(f) for f in self.forms]

    def pole_key(self) -> FrozenSet:
        return frozenset(f.monic_key() for f in self.forms)

    def fixing_matrix(self, start: int = 0) -> Mat2:
        """Producto de (TU^n)⁻¹ a lo largo del ciclo: fija α_start y α'_start."""
        mats = branch_matrices(self.ctx)
        L = len(self.forms)
        out = Mat2.identity(self.ctx)
        for i in range(L):
            n = self.exponents[(start + i) % L]
            out = out * mats[n - 1].inverse()
        return out

    def with_symmetry(self, symmetric: bool) -> "Cycle":
        return Cycle(self.forms, self.exponents, self.class_tag, symmetric)


# ================== Φ_p ==================
def phi(ctx: NFContext, x) -> Tuple[int, QElem]:
    if field_sign(x) != 1:
        raise InvariantViolation(f"phi requiere x > 0 (x = {x})")
    hits = []
    for n, M in enumerate(branch_matrices(ctx), start=1):
        y = mobius(M, x)
        if y is not INFINITY and field_sign(y) == 1:
            hits.append((n, y))
    if len(hits) != 1:
        raise InvariantViolation(
            f"phi: {len(hits)} ramas positivas para x = {x} (¿número parabólico?)"
        )
    return hits[0]


def branch_breakpoints(ctx: NFContext) -> List[Point]:
    """U^m(0) para m = 1..p; U^1(0) = ∞ y U^p(0) = 0."""
    zero = ctx.zero()
    return [mobius(u_power_table(ctx, m), zero) for m in range(1, ctx.p + 1)]


def branch_by_interval(ctx: NFContext, x) -> int:
    """Rama n tal que U^{p-n+1}(0) < x < U^{p-n}(0)."""
    bps = branch_breakpoints(ctx)  # bps[m-1] = U^m(0)
    p = ctx.p
    for n in range(1, p):
        lo, hi = bps[p - n], bps[p - n - 1]
        above = field_sign(x - lo) == 1
        below = hi is INFINITY or field_sign(hi - x) == 1
        if above and below:
            return n
    raise InvariantViolation(f"x = {x} cae en un punto de corte (parabólico) o no es positivo")


def _phi_step(ctx: NFContext, Q: BQF) -> Tuple[int, BQF]:
    n, y = phi(ctx, alpha_of(Q))
    Qh = act(Q, branch_matrices(ctx)[n - 1].inverse())
    if alpha_of(Qh) != y:
        raise InvariantViolation(f"alpha_of(Q̂) != Φ_p(α) para {Q}")
    return n, Qh


def phi_on_form(ctx: NFContext, Q: BQF) -> Tuple[int, BQF]:
    if not is_simple(Q):
        raise NotSimple(f"{Q} no es simple")
    n, Qh = _phi_step(ctx, Q)
    if not is_simple(Qh):
        raise InvariantViolation(f"imagen no simple: {Qh}")
    return n, Qh


# ================== CICLOS ==================
def _make_cycle(forms: Sequence[BQF], exponents: Sequence[int]) -> Cycle:
    tag = min(f.tag() for f in forms)
    return Cycle(tuple(forms), tuple(exponents), tag)


def cycle_from(ctx: NFContext, Q: BQF, max_steps: Optional[int] = None) -> Cycle:
    if not is_simple(Q):
        raise NotSimple(f"{Q} no es simple")
    cap = max_steps or settings.CYCLE_MAX_STEPS
    forms, exps = [Q], []
    cur = Q
    for _ in range(cap):
        n, cur = phi_on_form(ctx, cur)
        exps.append(n)
        if cur == Q:
            return _make_cycle(forms, exps)
        forms.append(cur)
    raise CycleLimitExceeded(f"sin ciclo tras {cap} pasos desde {Q} (¿entrada no simple o corrupta?)")


def reduce_to_cycle(ctx: NFContext, Q: BQF, max_steps: Optional[int] = None) -> Cycle:
    """Cualquier forma hiperbólica -> ciclo de su clase (T si α < 0, luego Φ_p)."""
    cap = max_steps or settings.CYCLE_MAX_STEPS
    _, T, _ = generators(ctx)
    cur = Q
    if alpha_of(cur).sign() < 0:
        cur = act(cur, T)
    seen: Dict[BQF, int] = {}
    orbit: List[BQF] = []
    exps: List[int] = []
    for _ in range(cap):
        if cur in seen:
            i = seen[cur]
            forms, cyc_exps = orbit[i:], exps[i:]
            if not all(is_simple(f) for f in forms):
                raise InvariantViolation(f"órbita periódica con formas no simples desde {Q}")
            return _make_cycle(forms, cyc_exps)
        seen[cur] = len(orbit)
        orbit.append(cur)
        n, cur = _phi_step(ctx, cur)
        exps.append(n)
    raise CycleLimitExceeded(f"sin ciclo tras {cap} pasos desde {Q}")


def irreducible_pole_set(ctx: NFContext, Q: BQF,
                         max_steps: Optional[int] = None) -> Tuple[List[QElem], List[QElem]]:
    _, T, _ = generators(ctx)
    positives = cycle_from(ctx, Q, max_steps).alphas()
    negatives = [mobius(T, a) for a in positives]
    if any(x.sign() != -1 for x in negatives):
        raise InvariantViolation("TZ_A contiene polos no negativos")
    return positives, negatives


def neg_poles_identity(ctx: NFContext, Q: BQF, max_steps: Optional[int] = None) -> bool:
    """TZ_A = Z'_{-A} como conjuntos."""
    _, negatives = irreducible_pole_set(ctx, Q, max_steps)
    other = cycle_from(ctx, negated_class_representative(Q), max_steps)
    conj = [hecke_conjugate(a) for a in other.alphas()]
    return set(negatives) == set(conj) and len(negatives) == len(conj)


def is_symmetric_class(ctx: NFContext, Q: BQF, max_steps: Optional[int] = None) -> bool:
    """-A = A; dos rutas independientes que deben coincidir."""
    own = cycle_from(ctx, Q, max_steps)
    via_t = cycle_from(ctx, negated_class_representative(Q), max_steps)
    _, _, U = generators(ctx)
    via_phi = reduce_to_cycle(ctx, act(-Q, U), max_steps)
    if via_t.class_tag != via_phi.class_tag:
        raise InvariantViolation(
            f"las dos rutas de -A discrepan: {via_t.class_tag} vs {via_phi.class_tag}"
        )
    return via_t.class_tag == own.class_tag


# ================== ENUMERACIÓN ==================
def enumerate_classes(ctx: NFContext, word_len: int, max_steps: Optional[int] = None,
                      with_symmetry: bool = True) -> List[Cycle]:
    """
    Recorre palabras U^{j_r}T…U^{j_1}T (1 <= r <= word_len, 1 <= j <= p-1),
    extrae formas de las hiperbólicas y devuelve ciclos distintos,
    ordenados por class_tag.
    """
    if word_len < 1:
        raise SpecError("word_len debe ser >= 1")
    _, T, _ = generators(ctx)
    blocks = [u_power_table(ctx, j) * T for j in range(1, ctx.p)]

    seen_forms: set = set()
    seen_keys: set = set()
    found: Dict[str, Cycle] = {}

    stack: List[Tuple[Mat2, int]] = [(b, 1) for b in reversed(blocks)]
    while stack:
        M, depth = stack.pop()
        if depth < word_len:
            stack.extend((b * M, depth + 1) for b in reversed(blocks))
        if M.c.is_zero() or classify(M) != HYPERBOLIC:
            continue
        Q = form_from_matrix(M, "+")
        if Q in seen_forms:
            continue
        cyc = reduce_to_cycle(ctx, Q, max_steps)
        seen_forms.update(cyc.forms)
        key = cyc.pole_key()
        if key in seen_keys or cyc.class_tag in found:
            continue
        seen_keys.add(key)
        if with_symmetry:
            cyc = cyc.with_symmetry(is_symmetric_class(ctx, cyc.forms[0], max_steps))
        found[cyc.class_tag] = cyc
        log_json(evt="class_found", p=ctx.p, class_tag=cyc.class_tag, length=len(cyc),
                 word=M.word, symmetric=cyc.symmetric)

    return [found[t] for t in sorted(found)]
