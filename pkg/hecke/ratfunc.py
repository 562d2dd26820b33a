# hecke/ratfunc.py
"""
Funciones racionales en z sobre Q(λ_p) o Q(λ_p)(√D).

Polinomios densos little-endian (índice = grado) con coeficientes NFElem o
QElem; el cuerpo se declara con un NFContext o una QuadraticExtension.
Incluye el operador slash de peso 2k, partes principales y q_{k,α}.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import List, Optional, Sequence, Tuple, Union

from .errors import ContextMismatch, FieldDivisionByZero, PoleProximity, SpecError
from .heckealg import BQF, Mat2, alpha_of
from .numberfield import (
    NFContext,
    NFElem,
    QElem,
    QuadraticExtension,
    interval_context,
    iv_rational,
    to_rational,
)
from .settings import settings

Field = Union[NFContext, QuadraticExtension]
Poly = List  # coeficientes little-endian


# ================== POLINOMIOS ==================
def p_strip(f: Poly) -> Poly:
    f = list(f)
    while f and f[-1].is_zero():
        f.pop()
    return f


def p_add(f: Poly, g: Poly) -> Poly:
    if len(f) < len(g):
        f, g = g, f
    out = list(f)
    for i, c in enumerate(g):
        out[i] = out[i] + c
    return p_strip(out)


def p_neg(f: Poly) -> Poly:
    return [-c for c in f]


def p_sub(f: Poly, g: Poly) -> Poly:
    return p_add(f, p_neg(g))


def p_scale(f: Poly, c) -> Poly:
    if c.is_zero():
        return []
    return [x * c for x in f]


def p_mul(f: Poly, g: Poly) -> Poly:
    if not f or not g:
        return []
    out: list = [None] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a.is_zero():
            continue
        for j, b in enumerate(g):
            if b.is_zero():
                continue
            t = a * b
            out[i + j] = t if out[i + j] is None else out[i + j] + t
    zero = (f[0] - f[0])
    return p_strip([zero if c is None else c for c in out])


def p_pow(f: Poly, n: int, one) -> Poly:
    out: Poly = [one]
    base = f
    while n:
        if n & 1:
            out = p_mul(out, base)
        base = p_mul(base, base)
        n >>= 1
    return out


def p_shift(f: Poly, k: int, zero) -> Poly:
    """f · z^k."""
    return [zero] * k + list(f) if f else []


def p_divmod(f: Poly, g: Poly) -> Tuple[Poly, Poly]:
    if not g:
        raise FieldDivisionByZero("división por el polinomio cero")
    r = list(f)
    dg = len(g) - 1
    inv = g[-1].inverse()
    if len(r) <= dg:
        return [], p_strip(r)
    q = [None] * (len(r) - dg)
    for i in range(len(r) - 1, dg - 1, -1):
        c = r[i] * inv
        q[i - dg] = c
        if c.is_zero():
            continue
        for j in range(dg + 1):
            r[i - dg + j] = r[i - dg + j] - c * g[j]
    return p_strip(q), p_strip(r[:dg])


def p_monic(f: Poly) -> Poly:
    if not f:
        return f
    return p_scale(f, f[-1].inverse())


def p_gcd(f: Poly, g: Poly) -> Poly:
    a, b = p_strip(f), p_strip(g)
    while b:
        _, r = p_divmod(a, b)
        a, b = b, r
    return p_monic(a)


def p_eval(f: Poly, x, zero):
    acc = zero
    for c in reversed(f):
        acc = acc * x + c
    return acc


def p_taylor_shift(f: Poly, a) -> Poly:
    """f(w + a) por Horner."""
    out: Poly = []
    for c in reversed(f):
        # out = out·(w + a) + c
        nxt = [None] * (len(out) + 1)
        for i, x in enumerate(out):
            nxt[i + 1] = x if nxt[i + 1] is None else nxt[i + 1] + x
            xa = x * a
            nxt[i] = xa if nxt[i] is None else nxt[i] + xa
        nxt[0] = c if nxt[0] is None else nxt[0] + c
        out = [c * 0 if v is None else v for v in nxt]
    return p_strip(out)


def p_degree(f: Poly) -> int:
    return len(f) - 1


def low_order(f: Poly) -> int:
    """Multiplicidad de la raíz z = 0."""
    m = 0
    while m < len(f) and f[m].is_zero():
        m += 1
    return m


# ================== FUNCIONES RACIONALES ==================
def field_of(x) -> Field:
    return x.ext if isinstance(x, QElem) else x.ctx


def base_context(F: Field) -> NFContext:
    return F if isinstance(F, NFContext) else F.ctx


def field_D(F: Field) -> Optional[NFElem]:
    return None if isinstance(F, NFContext) else F.D


class RatFunc:
    """num/den con den mónico; reduce=True fuerza gcd(num, den) = 1."""

    __slots__ = ("field", "num", "den")

    def __init__(self, F: Field, num: Sequence, den: Sequence, reduce: bool = True):
        self.field = F
        num = p_strip([F.coerce(c) for c in num])
        den = p_strip([F.coerce(c) for c in den])
        if not den:
            raise FieldDivisionByZero("denominador nulo")
        if not num:
            self.num, self.den = [], [F.one()]
            return
        if reduce and len(den) > 1:
            g = p_gcd(num, den)
            if len(g) > 1:
                num, _ = p_divmod(num, g)
                den, _ = p_divmod(den, g)
        lc = den[-1]
        if lc != 1:
            inv = lc.inverse()
            num, den = p_scale(num, inv), p_scale(den, inv)
        self.num, self.den = num, den

    # --- constructores ---
    @classmethod
    def zero(cls, F: Field) -> "RatFunc":
        return cls(F, [], [F.one()], reduce=False)

    @classmethod
    def const(cls, F: Field, c) -> "RatFunc":
        return cls(F, [F.coerce(c)], [F.one()], reduce=False)

    @classmethod
    def poly(cls, F: Field, coeffs: Sequence) -> "RatFunc":
        return cls(F, coeffs, [F.one()], reduce=False)

    @classmethod
    def z_power(cls, F: Field, n: int) -> "RatFunc":
        """z^n, n entero (negativo incluido)."""
        zero, one = F.zero(), F.one()
        if n >= 0:
            return cls(F, [zero] * n + [one], [one], reduce=False)
        return cls(F, [one], [zero] * (-n) + [one], reduce=False)

    # --- consultas ---
    @property
    def ctx(self) -> NFContext:
        return base_context(self.field)

    @property
    def D(self) -> Optional[NFElem]:
        return field_D(self.field)

    def is_zero(self) -> bool:
        return not self.num

    def is_base(self) -> bool:
        return isinstance(self.field, NFContext)

    def degrees(self) -> Tuple[int, int]:
        return p_degree(self.num), p_degree(self.den)

    def normalized(self) -> "RatFunc":
        return RatFunc(self.field, self.num, self.den, reduce=True)

    # --- cambio de cuerpo ---
    def lift(self, F: Field) -> "RatFunc":
        if F == self.field:
            return self
        if not self.is_base() or base_context(F) != self.ctx:
            raise ContextMismatch(f"no se puede llevar {self.field!r} a {F!r}")
        return RatFunc(F, self.num, self.den, reduce=False)

    def descend(self) -> Optional["RatFunc"]:
        """Versión sobre Q(λ_p) si todas las partes √D se anulan; si no, None."""
        if self.is_base():
            return self
        coeffs = self.num + self.den
        if any(not c.v.is_zero() for c in coeffs):
            return None
        ctx = self.ctx
        return RatFunc(ctx, [c.u for c in self.num], [c.u for c in self.den], reduce=False)

    def is_pure_sqrt_multiple(self) -> bool:
        """num con partes u nulas (den sobre la base): f = √D · g con g sobre la base."""
        if self.is_base() or self.is_zero():
            return False
        return (all(c.u.is_zero() for c in self.num)
                and all(c.v.is_zero() for c in self.den))

    def _unify(self, other: "RatFunc") -> Tuple["RatFunc", "RatFunc"]:
        if self.field == other.field:
            return self, other
        if self.is_base():
            return self.lift(other.field), other
        if other.is_base():
            return self, other.lift(self.field)
        raise ContextMismatch(f"cuerpos incompatibles: {self.field!r} / {other.field!r}")

    # --- aritmética ---
    def add(self, other: "RatFunc", reduce: bool = True) -> "RatFunc":
        f, g = self._unify(other)
        if f.is_zero():
            return g
        if g.is_zero():
            return f
        if f.den == g.den:
            return RatFunc(f.field, p_add(f.num, g.num), f.den, reduce=reduce)
        num = p_add(p_mul(f.num, g.den), p_mul(g.num, f.den))
        return RatFunc(f.field, num, p_mul(f.den, g.den), reduce=reduce)

    def __add__(self, other):
        if not isinstance(other, RatFunc):
            other = RatFunc.const(self.field, other)
        return self.add(other)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(self.field, p_neg(self.num), self.den, reduce=False)

    def __sub__(self, other):
        if not isinstance(other, RatFunc):
            other = RatFunc.const(self.field, other)
        return self.add(-other)

    def __mul__(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, QElem) and self.is_base():
                return self.lift(other.ext) * other
            c = self.field.coerce(other)
            return RatFunc(self.field, p_scale(self.num, c), self.den, reduce=False)
        f, g = self._unify(other)
        return RatFunc(f.field, p_mul(f.num, g.num), p_mul(f.den, g.den))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatFunc):
            return NotImplemented
        try:
            f, g = self._unify(other)
        except ContextMismatch:
            return False
        return p_mul(f.num, g.den) == p_mul(g.num, f.den)

    def __hash__(self):
        return hash(len(self.num) + 31 * len(self.den))

    def evaluate(self, x):
        """Valor exacto en un punto del cuerpo (o de una extensión de la base)."""
        F = self.field
        num = p_eval(self.num, x, F.zero())
        den = p_eval(self.den, x, F.zero())
        if den.is_zero():
            raise FieldDivisionByZero(f"polo en z = {x}")
        return num / den

    def at_infinity(self):
        """q(∞): cociente de coeficientes líderes si los grados coinciden; 0 si deg num < deg den."""
        dn, dd = self.degrees()
        if self.is_zero() or dn < dd:
            return self.field.zero()
        if dn == dd:
            return self.num[-1] / self.den[-1]
        return None

    def __repr__(self) -> str:
        return f"RatFunc({self.field!r}, num={[str(c) for c in self.num]}, den={[str(c) for c in self.den]})"


# ================== SLASH ==================
def _linear(F: Field, a, b) -> Poly:
    """a z + b."""
    return p_strip([F.coerce(b), F.coerce(a)])


def _homogenize(f: Poly, n: int, P: Poly, R: Poly, F: Field) -> Poly:
    """Σ f_i P^i R^(n-i)."""
    one = F.one()
    P_pows = [[one]]
    R_pows = [[one]]
    for _ in range(n):
        P_pows.append(p_mul(P_pows[-1], P))
        R_pows.append(p_mul(R_pows[-1], R))
    out: Poly = []
    for i, c in enumerate(f):
        if c.is_zero():
            continue
        out = p_add(out, p_scale(p_mul(P_pows[i], R_pows[n - i]), c))
    return out


def slash(f: RatFunc, M: Mat2, k: int) -> RatFunc:
    """(f|M)(z) = (cz+d)^{-2k} f(Mz); conserva la reducción de f."""
    if k < 1:
        raise SpecError("k debe ser >= 1")
    if f.is_zero():
        return f
    F = f.field
    a, b, c, d = M.entries()
    P = _linear(F, a, b)
    R = _linear(F, c, d)
    n, e = f.degrees()
    num = _homogenize(f.num, n, P, R, F)
    den = _homogenize(f.den, e, P, R, F)
    extra = e - n - 2 * k
    if extra > 0:
        num = p_mul(num, p_pow(R, extra, F.one()))
    elif extra < 0:
        den = p_mul(den, p_pow(R, -extra, F.one()))
    return RatFunc(F, num, den, reduce=False)


# ================== PARTES PRINCIPALES ==================
@dataclass(frozen=True)
class PrincipalPart:
    """Σ_j c_j (z-α)^{-j}; coeffs = (c_m, …, c_1)."""

    alpha: object
    coeffs: Tuple

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def is_empty(self) -> bool:
        return not self.coeffs

    @property
    def leading(self):
        return self.coeffs[0]

    def scaled(self, c) -> "PrincipalPart":
        return PrincipalPart(self.alpha, tuple(x * c for x in self.coeffs))

    def ratio_to(self, other: "PrincipalPart"):
        """c con self = c·other, o None si no son proporcionales."""
        if self.is_empty() or other.is_empty() or self.order != other.order:
            return None
        c = self.leading / other.leading
        if all(x == c * y for x, y in zip(self.coeffs, other.coeffs)):
            return c
        return None

    def as_ratfunc(self) -> RatFunc:
        F = field_of(self.alpha)
        if self.is_empty():
            return RatFunc.zero(F)
        m = self.order
        center = self.alpha
        if isinstance(F, QuadraticExtension) and F.rational_square:
            center = F.coerce(F.specialize(center))
        lin = [-center, F.one()]
        num: Poly = []
        power: Poly = [F.one()]
        # coeficiente c_{m-i} multiplica (z-α)^i
        for i in range(m):
            num = p_add(num, p_scale(power, self.coeffs[i]))
            power = p_mul(power, lin)
        return RatFunc(F, num, power, reduce=False)


def _point_field(f: RatFunc, alpha) -> Tuple[Field, object]:
    if isinstance(alpha, QElem):
        return alpha.ext, alpha
    if isinstance(alpha, NFElem):
        return f.field, f.field.coerce(alpha)
    return f.field, f.field.coerce(to_rational(alpha))


def _specialized(F: QuadraticExtension, f: RatFunc, pt) -> Tuple[RatFunc, NFElem]:
    """f y el punto llevados a Q(λ_p) por √D = r (D cuadrado racional)."""
    ctx = F.ctx
    if f.is_base():
        g = f
    else:
        g = RatFunc(ctx, [F.specialize(c) for c in f.num], [F.specialize(c) for c in f.den], reduce=False)
    return g, F.specialize(pt)


def _laurent_head(F: Field, f: RatFunc, pt) -> Tuple:
    num_s = p_taylor_shift(f.num, pt)
    den_s = p_taylor_shift(f.den, pt)
    m = low_order(den_s)
    mn = low_order(num_s) if num_s else 0
    order = m - mn
    if order <= 0 or not num_s:
        return ()
    N = num_s[mn:]
    H = den_s[m:]
    inv_h0 = H[0].inverse()
    series = []
    for i in range(order):
        acc = N[i] if i < len(N) else F.zero()
        for j in range(1, min(i, len(H) - 1) + 1):
            acc = acc - H[j] * series[i - j]
        series.append(acc * inv_h0)
    return tuple(series)


def principal_part(f: RatFunc, alpha) -> PrincipalPart:
    F, pt = _point_field(f, alpha)
    if isinstance(F, QuadraticExtension) and F.rational_square:
        # α es racional sobre Q(λ_p): se desarrolla allí y se devuelve dentro de F
        g, b = _specialized(F, f, pt)
        coeffs = _laurent_head(F.ctx, g, b)
        return PrincipalPart(pt, tuple(F.coerce(c) for c in coeffs))
    return PrincipalPart(pt, _laurent_head(F, f.lift(F), pt))


def q_k_alpha(ctx: NFContext, Q: BQF, k: int, at: str = "alpha") -> PrincipalPart:
    """
    q_{k,α} = PP_α[D^{k/2}/Q_α(z,1)^k]; el coeficiente de (z-α)^{-(k-j)} es
    (-1)^j C(k+j-1, j) (α-α')^{-j}.
    """
    if k < 1:
        raise SpecError("k debe ser >= 1")
    if Q.ctx != ctx:
        raise ContextMismatch("forma de otro contexto")
    alpha = alpha_of(Q)
    if at == "alpha":
        pt, delta = alpha, alpha - alpha.conj()
    elif at == "alpha_prime":
        pt, delta = alpha.conj(), alpha.conj() - alpha
    else:
        raise SpecError(f"punto inválido: {at!r}")
    dinv = delta.inverse()
    coeffs = []
    power = pt.ext.one()
    for j in range(k):
        coeffs.append(power * ((-1) ** j * comb(k + j - 1, j)))
        power = power * dinv
    ext = pt.ext
    if ext.rational_square:
        coeffs = [ext.coerce(ext.specialize(c)) for c in coeffs]
    return PrincipalPart(pt, tuple(coeffs))


def literal_power_ratfunc(Q: BQF, k: int) -> RatFunc:
    """D^{k/2} / Q(z,1)^k sobre Q(λ_p)(√D)."""
    ext = alpha_of(Q).ext
    quad = [ext.coerce(Q.C), ext.coerce(Q.B), ext.coerce(Q.A)]
    den = p_pow(quad, k, ext.one())
    return RatFunc(ext, [ext.sqrt_D() ** k], den, reduce=False)


def inverse_form_power(Q: BQF, k: int) -> RatFunc:
    """Q(z,1)^{-k} sobre Q(λ_p)."""
    ctx = Q.ctx
    den = p_pow([Q.C, Q.B, Q.A], k, ctx.one())
    return RatFunc(ctx, [ctx.one()], den, reduce=False)


# ================== EVALUACIÓN NUMÉRICA ==================
def _iv_point(iv, z0, bits: int):
    if isinstance(z0, complex):
        return iv.mpc(z0.real, z0.imag)
    if isinstance(z0, (NFElem, QElem)):
        return iv.mpc(z0.enclosure(bits), 0)
    if isinstance(z0, tuple):
        re, im = z0
        return iv.mpc(iv_rational(iv, to_rational(re)), iv_rational(iv, to_rational(im)))
    return iv.mpc(iv_rational(iv, to_rational(z0)), 0)


def eval_interval(f: RatFunc, z, bits: int):
    """f en un punto ya encerrado (ivmpc) a `bits` bits."""
    iv = interval_context(bits)

    def horner(poly: Poly):
        acc = iv.mpc(0, 0)
        for c in reversed(poly):
            acc = acc * z + c.enclosure(bits)
        return acc

    num = horner(f.num)
    den = horner(f.den)
    if (abs(den) > 0) is not True:
        raise PoleProximity(f"z = {z} demasiado cerca de un polo a {bits} bits")
    return num / den


def eval_numeric(f: RatFunc, z0, precision_bits: Optional[int] = None):
    """Encierro certificado (intervalo complejo de mpmath) de f(z0)."""
    bits = precision_bits or settings.NUMERIC_BITS
    iv = interval_context(bits)
    return eval_interval(f, _iv_point(iv, z0, bits), bits)
