# hecke/numberfield.py
"""
Aritmética exacta en Q(λ_p), λ_p = 2cos(π/p), y en las extensiones
cuadráticas Q(λ_p)(√D).

- Los elementos son vectores de racionales (little-endian en potencias de λ)
  reducidos módulo el polinomio mínimo m_p.
- El signo se decide con aritmética de intervalos (mpmath) sobre el
  encaje real λ_p -> 2cos(π/p), doblando precisión hasta excluir el 0.
"""
from __future__ import annotations

import threading
from math import isqrt
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Optional, Tuple, Union

from mpmath.ctx_iv import MPIntervalContext
from sympy import totient
from sympy.polys.densearith import dup_add, dup_mul, dup_mul_ground, dup_rem, dup_sub
from sympy.polys.densebasic import dup_strip
from sympy.polys.domains import QQ, ZZ
from sympy.polys.euclidtools import dup_invert
from sympy.polys.specialpolys import cyclotomic_poly

from .errors import (
    ContextMismatch,
    FieldDivisionByZero,
    InvariantViolation,
    PrecisionExhausted,
    SpecError,
)
from .logs import log_json
from .settings import settings

# ================== RACIONALES ==================
def to_rational(x):
    """Convierte int / "n/d" / Fraction / mpq a un elemento de QQ."""
    if isinstance(x, str):
        txt = x.strip()
        try:
            if "/" in txt:
                n, d = txt.split("/", 1)
                return QQ(int(n), int(d))
            return QQ(int(txt))
        except (ValueError, ZeroDivisionError) as e:
            raise SpecError(f"racional inválido: {x!r}") from e
    if isinstance(x, bool):
        return QQ(int(x))
    if isinstance(x, int):
        return QQ(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return QQ(int(x.numerator), int(x.denominator))
    raise SpecError(f"no es un racional: {x!r}")


def rational_str(c) -> str:
    return f"{int(c.numerator)}/{int(c.denominator)}"


def _rsign(c) -> int:
    return (c > 0) - (c < 0)


# ================== INTERVALOS ==================
_local = threading.local()


def interval_context(bits: int) -> MPIntervalContext:
    """Contexto de intervalos propio de cada hilo (mpmath guarda la precisión en el contexto)."""
    iv = getattr(_local, "iv", None)
    if iv is None:
        iv = MPIntervalContext()
        _local.iv = iv
    iv.prec = bits
    return iv


def iv_rational(iv: MPIntervalContext, c):
    return iv.mpf(int(c.numerator)) / iv.mpf(int(c.denominator))


@lru_cache(maxsize=512)
def _lambda_mpi(p: int, bits: int):
    iv = interval_context(bits)
    lam = 2 * iv.cos(iv.pi / p)
    return lam._mpi_


# ================== POLINOMIO MÍNIMO ==================
def real_cyclotomic_minpoly(p: int) -> Tuple[int, ...]:
    """
    m_p a partir de Φ_{2p}: Φ_{2p}(x) = x^{d/2} Ψ(x + 1/x), m_p = Ψ.
    Devuelve coeficientes enteros en grado descendente.
    """
    phi = [ZZ(int(c)) for c in cyclotomic_poly(2 * p, polys=True).all_coeffs()]
    d = len(phi) - 1
    half = d // 2

    def coeff(j: int):
        return phi[d - j]

    # x^n + x^-n = V_n(t), V_0 = 2, V_1 = t, V_{n+1} = t V_n - V_{n-1}
    psi = dup_strip([coeff(half)])
    v_prev, v_cur = [ZZ(2)], [ZZ(1), ZZ(0)]
    for n in range(1, half + 1):
        psi = dup_add(psi, dup_mul_ground(v_cur, coeff(half + n), ZZ), ZZ)
        v_prev, v_cur = v_cur, dup_sub(dup_mul([ZZ(1), ZZ(0)], v_cur, ZZ), v_prev, ZZ)
    return tuple(int(c) for c in psi)


# ================== CONTEXTO ==================
@dataclass(frozen=True)
class NFContext:
    p: int
    minpoly: Tuple[int, ...]  # grado descendente, mónico

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    @cached_property
    def modulus(self) -> list:
        return [QQ(c) for c in self.minpoly]

    # --- protocolo de cuerpo (lo usan los polinomios de ratfunc) ---
    def zero(self) -> "NFElem":
        return NFElem(self, (QQ.zero,) * self.degree)

    def one(self) -> "NFElem":
        return self.coerce(1)

    def lam(self) -> "NFElem":
        return self.element([0, 1])

    def element(self, coeffs: Iterable) -> "NFElem":
        """Elemento a partir de coeficientes little-endian de cualquier longitud."""
        f = dup_strip([to_rational(c) for c in reversed(list(coeffs))])
        if len(f) > self.degree:
            f = dup_rem(f, self.modulus, QQ)
        return NFElem(self, _pad(self, f))

    def coerce(self, x) -> "NFElem":
        if isinstance(x, NFElem):
            if x.ctx != self:
                raise ContextMismatch(f"p={x.ctx.p} frente a p={self.p}")
            return x
        if isinstance(x, QElem):
            base = x.as_base()
            if base is None:
                raise ContextMismatch("elemento con parte √D no nula en el cuerpo base")
            return self.coerce(base)
        c = to_rational(x)
        return NFElem(self, (c,) + (QQ.zero,) * (self.degree - 1))

    # --- encaje real ---
    def embedding(self, bits: int):
        """Intervalo certificado que contiene 2cos(π/p)."""
        iv = interval_context(bits)
        return iv.make_mpf(_lambda_mpi(self.p, bits))

    def minpoly_enclosure(self, bits: int):
        iv = interval_context(bits)
        lam = self.embedding(bits)
        acc = iv.mpf(0)
        for c in self.minpoly:
            acc = acc * lam + iv.mpf(c)
        return acc

    def embedding_ok(self, bits: int) -> bool:
        return 0 in self.minpoly_enclosure(bits)

    def __repr__(self) -> str:
        return f"NFContext(p={self.p})"


def _pad(ctx: NFContext, f: list) -> tuple:
    out = [QQ.zero] * ctx.degree
    for i, c in enumerate(reversed(f)):
        out[i] = c
    return tuple(out)


@lru_cache(maxsize=None)
def make_context(p: int) -> NFContext:
    if not isinstance(p, int) or p < 3:
        raise SpecError(f"p debe ser un entero >= 3 (recibido {p!r})")
    m = real_cyclotomic_minpoly(p)
    if len(m) - 1 != int(totient(2 * p)) // 2:
        raise InvariantViolation(f"grado de m_{p} distinto de φ(2p)/2")
    return NFContext(p=p, minpoly=m)


# ================== ELEMENTOS DE Q(λ_p) ==================
Scalar = Union[int, str, "NFElem"]


class NFElem:
    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: NFContext, coeffs: Tuple):
        self.ctx = ctx
        self.coeffs = coeffs

    # --- helpers ---
    def _dup(self) -> list:
        return dup_strip(list(reversed(self.coeffs)))

    def _lift(self, other):
        if isinstance(other, NFElem):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"p={self.ctx.p} frente a p={other.ctx.p}")
            return other
        if isinstance(other, QElem):
            return NotImplemented
        try:
            return self.ctx.coerce(other)
        except SpecError:
            return NotImplemented

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational(self):
        if not self.is_rational():
            raise SpecError(f"{self} no es racional")
        return self.coeffs[0]

    # --- aritmética ---
    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return NFElem(self.ctx, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return NFElem(self.ctx, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return NFElem(self.ctx, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        if self.ctx.degree == 1:
            return NFElem(self.ctx, (self.coeffs[0] * other.coeffs[0],))
        f = dup_mul(self._dup(), other._dup(), QQ)
        return NFElem(self.ctx, _pad(self.ctx, dup_rem(f, self.ctx.modulus, QQ)))

    __rmul__ = __mul__

    def inverse(self) -> "NFElem":
        if self.is_zero():
            raise FieldDivisionByZero(f"división por cero en Q(λ_{self.ctx.p})")
        if self.is_rational():
            return self.ctx.coerce(QQ(1) / self.coeffs[0])
        s = dup_invert(self._dup(), self.ctx.modulus, QQ)
        return NFElem(self.ctx, _pad(self.ctx, s))

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = self.ctx.one(), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # --- comparación ---
    def __eq__(self, other):
        if isinstance(other, QElem):
            return NotImplemented
        if not isinstance(other, NFElem):
            try:
                other = self.ctx.coerce(other)
            except (SpecError, ContextMismatch):
                return NotImplemented
        return self.ctx == other.ctx and self.coeffs == other.coeffs

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return hash((self.ctx.p, self.coeffs))

    # --- signo certificado ---
    def enclosure(self, bits: int):
        iv = interval_context(bits)
        lam = self.ctx.embedding(bits)
        acc = iv.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * lam + iv_rational(iv, c)
        return acc

    def sign(self) -> int:
        if self.is_zero():
            return 0
        if self.is_rational():
            return _rsign(self.coeffs[0])
        bits = settings.PRECISION_BITS
        while bits <= settings.MAX_PRECISION_BITS:
            v = self.enclosure(bits)
            if (v > 0) is True:
                return 1
            if (v < 0) is True:
                return -1
            bits *= 2
            if bits > 1024:
                log_json(evt="precision_refined", p=self.ctx.p, bits=bits)
        raise PrecisionExhausted(f"signo de {self} indeciso a {settings.MAX_PRECISION_BITS} bits")

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else ("λ" if i == 1 else f"λ^{i}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append(f"-{mono}")
            else:
                txt = str(int(c.numerator)) if int(c.denominator) == 1 else rational_str(c)
                terms.append(f"{txt}*{mono}" if mono else txt)
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"

    def __repr__(self) -> str:
        return f"NFElem(p={self.ctx.p}, {self})"


def nf_sign(a: NFElem) -> int:
    return a.sign()


def nf_arith(a: NFElem, b: NFElem, op: str) -> NFElem:
    if a.ctx != b.ctx:
        raise ContextMismatch(f"p={a.ctx.p} frente a p={b.ctx.p}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise SpecError(f"operación desconocida: {op}")


# ================== EXTENSIÓN CUADRÁTICA ==================
@dataclass(frozen=True)
class QuadraticExtension:
    ctx: NFContext
    D: NFElem

    def __post_init__(self):
        if self.D.ctx != self.ctx:
            raise ContextMismatch("D pertenece a otro cuerpo")
        if self.D.sign() != 1:
            raise SpecError(f"D debe ser positivo en el encaje real (D = {self.D})")

    def zero(self) -> "QElem":
        z = self.ctx.zero()
        return QElem(self, z, z)

    def one(self) -> "QElem":
        return QElem(self, self.ctx.one(), self.ctx.zero())

    @cached_property
    def rational_root(self) -> Optional[NFElem]:
        """r > 0 racional con r² = D, o None."""
        if not self.D.is_rational():
            return None
        c = self.D.rational()
        n, d = int(c.numerator), int(c.denominator)
        rn, rd = isqrt(n), isqrt(d)
        if rn * rn != n or rd * rd != d:
            return None
        return self.ctx.element([QQ(rn, rd)])

    @property
    def rational_square(self) -> bool:
        """D = r² con r racional: √D es un símbolo formal y el anillo tiene divisores de cero."""
        return self.rational_root is not None

    def specialize(self, x) -> NFElem:
        """Valor real de x = u + v√D en Q(λ_p) cuando √D = r es racional."""
        if isinstance(x, NFElem):
            return self.ctx.coerce(x)
        r = self.rational_root
        if r is None:
            raise InvariantViolation(f"√({self.D}) no está en Q(λ_{self.ctx.p})")
        x = self.coerce(x)
        return x.u + x.v * r

    def sqrt_D(self) -> "QElem":
        return QElem(self, self.ctx.zero(), self.ctx.one())

    def coerce(self, x) -> "QElem":
        if isinstance(x, QElem):
            if x.ext != self:
                raise ContextMismatch(f"D={x.ext.D} frente a D={self.D}")
            return x
        return QElem(self, self.ctx.coerce(x), self.ctx.zero())

    def __repr__(self) -> str:
        return f"Q(λ_{self.ctx.p})(√({self.D}))"


@lru_cache(maxsize=4096)
def quadratic_extension(D: NFElem) -> QuadraticExtension:
    return QuadraticExtension(D.ctx, D)


class QElem:
    """u + v√D con u, v en Q(λ_p)."""

    __slots__ = ("ext", "u", "v")

    def __init__(self, ext: QuadraticExtension, u: NFElem, v: NFElem):
        self.ext = ext
        self.u = u
        self.v = v

    @property
    def ctx(self) -> NFContext:
        return self.ext.ctx

    def _lift(self, other):
        try:
            return self.ext.coerce(other)
        except SpecError:
            return NotImplemented

    def is_zero(self) -> bool:
        return self.u.is_zero() and self.v.is_zero()

    def as_base(self) -> Optional[NFElem]:
        return self.u if self.v.is_zero() else None

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return QElem(self.ext, self.u + other.u, self.v + other.v)

    __radd__ = __add__

    def __neg__(self):
        return QElem(self.ext, -self.u, -self.v)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return QElem(self.ext, self.u - other.u, self.v - other.v)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        u = self.u * other.u + self.v * other.v * self.ext.D
        v = self.u * other.v + self.v * other.u
        return QElem(self.ext, u, v)

    __rmul__ = __mul__

    def norm(self) -> NFElem:
        return self.u * self.u - self.v * self.v * self.ext.D

    def inverse(self) -> "QElem":
        if self.is_zero():
            raise FieldDivisionByZero("división por cero en la extensión cuadrática")
        n = self.norm()
        if n.is_zero():
            raise FieldDivisionByZero(f"D = {self.ext.D} es un cuadrado en Q(λ_{self.ctx.p})")
        inv = n.inverse()
        return QElem(self.ext, self.u * inv, -self.v * inv)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = self.ext.one(), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "QElem":
        return QElem(self.ext, self.u, -self.v)

    def __eq__(self, other):
        if not isinstance(other, QElem):
            try:
                other = self.ext.coerce(other)
            except (SpecError, ContextMismatch):
                return NotImplemented
        if other.ext != self.ext:
            # igualdad solo definida con D fijo; ver same_value
            return False
        return self.u == other.u and self.v == other.v

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return hash((self.ext.D.coeffs, self.u.coeffs, self.v.coeffs))

    def sign(self) -> int:
        su, sv = self.u.sign(), self.v.sign()
        if sv == 0:
            return su
        if su == 0 or su == sv:
            return sv
        # signos opuestos: u + v√D = (u² - v²D) / (u - v√D), y u - v√D tiene el signo de u
        return su * self.norm().sign()

    def enclosure(self, bits: int):
        iv = interval_context(bits)
        return self.u.enclosure(bits) + self.v.enclosure(bits) * iv.sqrt(self.ext.D.enclosure(bits))

    def __str__(self) -> str:
        if self.v.is_zero():
            return str(self.u)
        return f"({self.u}) + ({self.v})√({self.ext.D})"

    def __repr__(self) -> str:
        return f"QElem({self})"


def q_arith(x: QElem, y: QElem, op: str) -> QElem:
    if x.ext != y.ext:
        raise ContextMismatch("operandos con D distinto")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise SpecError(f"operación desconocida: {op}")


def q_conj(x: QElem) -> QElem:
    return x.conj()


def q_sign(x: QElem) -> int:
    return x.sign()


FieldElem = Union[NFElem, QElem]


def same_value(x: FieldElem, y: FieldElem) -> bool:
    """Igualdad de valores aunque vivan sobre discriminantes distintos (D1 = s² D2)."""
    ux, vx, dx = _parts(x)
    uy, vy, dy = _parts(y)
    if ux != uy:
        return False
    if vx.sign() != vy.sign():
        return False
    if vx.is_zero():
        return True
    return vx * vx * dx == vy * vy * dy


def _parts(x: FieldElem):
    if isinstance(x, QElem):
        return x.u, x.v, x.ext.D
    return x, x.ctx.zero(), x.ctx.zero()


def field_sign(x: FieldElem) -> int:
    return x.sign()
