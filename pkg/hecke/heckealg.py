# hecke/heckealg.py
"""
Matrices de G_p, palabras en los generadores, clasificación por traza,
puntos fijos y formas cuadráticas binarias λ_p (BQF) con la acción de G_p.
"""
from __future__ import annotations

import json
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

from sympy.polys.domains import QQ

from .errors import FixedPointAtInfinity, NotHyperbolic, NotInGroup, SpecError
from .logs import log_json
from .numberfield import (
    NFContext,
    NFElem,
    QElem,
    quadratic_extension,
    rational_str,
)

# ================== PUNTOS ==================
class _Infinity:
    """Punto ∞ de la recta proyectiva (acción de Möbius sin excepciones)."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "INFINITY"

    def __str__(self) -> str:
        return "∞"


INFINITY = _Infinity()
Point = Union[NFElem, QElem, _Infinity]

# alfabeto de palabras: S, s = S⁻¹, T, U, u = U⁻¹
_INVERSE_LETTER = {"S": "s", "s": "S", "T": "T", "U": "u", "u": "U"}


def invert_word(word: str) -> str:
    return "".join(_INVERSE_LETTER[ch] for ch in reversed(word))


# ================== MATRICES ==================
class Mat2:
    __slots__ = ("a", "b", "c", "d", "word")

    def __init__(self, a: NFElem, b: NFElem, c: NFElem, d: NFElem,
                 word: Optional[str] = None, check: bool = True):
        self.a, self.b, self.c, self.d = a, b, c, d
        self.word = word
        if check and a * d - b * c != 1:
            raise NotInGroup(f"det != 1: {self}")

    @property
    def ctx(self) -> NFContext:
        return self.a.ctx

    @classmethod
    def identity(cls, ctx: NFContext) -> "Mat2":
        return cls(ctx.one(), ctx.zero(), ctx.zero(), ctx.one(), word="", check=False)

    def entries(self) -> Tuple[NFElem, NFElem, NFElem, NFElem]:
        return self.a, self.b, self.c, self.d

    def __mul__(self, other: "Mat2") -> "Mat2":
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        word = None
        if self.word is not None and other.word is not None:
            word = self.word + other.word
        return Mat2(a, b, c, d, word=word, check=False)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d, word=self.word, check=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat2):
            return NotImplemented
        return self.entries() == other.entries()

    def __hash__(self):
        return hash(tuple(x.coeffs for x in self.entries()))

    def projectively_equal(self, other: "Mat2") -> bool:
        return self == other or self == -other

    def is_identity(self) -> bool:
        """Identidad proyectiva (±I)."""
        return self.b.is_zero() and self.c.is_zero() and self.a == self.d and (self.a == 1 or self.a == -1)

    def inverse(self) -> "Mat2":
        word = invert_word(self.word) if self.word is not None else None
        return Mat2(self.d, -self.b, -self.c, self.a, word=word, check=False)

    def power(self, n: int) -> "Mat2":
        if n < 0:
            return self.inverse().power(-n)
        out, base = Mat2.identity(self.ctx), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def trace(self) -> NFElem:
        return self.a + self.d

    def det(self) -> NFElem:
        return self.a * self.d - self.b * self.c

    def __repr__(self) -> str:
        w = f", word={self.word!r}" if self.word else ""
        return f"Mat2([[{self.a}, {self.b}], [{self.c}, {self.d}]]{w})"


def generators(ctx: NFContext) -> Tuple[Mat2, Mat2, Mat2]:
    """S = [[1,λ],[0,1]], T = [[0,-1],[1,0]], U = ST."""
    one, zero, lam = ctx.one(), ctx.zero(), ctx.lam()
    S = Mat2(one, lam, zero, one, word="S")
    T = Mat2(zero, -one, one, zero, word="T")
    U = Mat2(lam, -one, one, zero, word="U")
    return S, T, U


def letter_matrix(ctx: NFContext, letter: str) -> Mat2:
    S, T, U = generators(ctx)
    table = {"S": S, "s": S.inverse(), "T": T, "U": U, "u": U.inverse()}
    try:
        return table[letter]
    except KeyError:
        raise SpecError(f"letra desconocida en la palabra: {letter!r}") from None


def word_matrix(ctx: NFContext, word: str) -> Mat2:
    out = Mat2.identity(ctx)
    for ch in word:
        out = out * letter_matrix(ctx, ch)
    return out


# ================== POTENCIAS DE U ==================
@lru_cache(maxsize=256)
def a_sequence(ctx: NFContext) -> Dict[int, NFElem]:
    """a_{-2}..a_p con a_n = λ a_{n-1} - a_{n-2}, a_{-1} = 0, a_0 = 1."""
    lam = ctx.lam()
    seq = {-2: -ctx.one(), -1: ctx.zero(), 0: ctx.one()}
    for n in range(1, ctx.p + 1):
        seq[n] = lam * seq[n - 1] - seq[n - 2]
    return seq


def u_power_table(ctx: NFContext, n: int) -> Mat2:
    if not 0 <= n <= ctx.p:
        raise SpecError(f"n fuera de rango 0..{ctx.p}: {n}")
    a = a_sequence(ctx)
    return Mat2(a[n], -a[n - 1], a[n - 1], -a[n - 2], word="U" * n, check=False)


@lru_cache(maxsize=256)
def branch_matrices(ctx: NFContext) -> Tuple[Mat2, ...]:
    """TU^n para n = 1..p-1 (índice 0 <-> n = 1)."""
    _, T, _ = generators(ctx)
    return tuple(T * u_power_table(ctx, n) for n in range(1, ctx.p))


# ================== CLASIFICACIÓN ==================
HYPERBOLIC = "hyperbolic"
PARABOLIC = "parabolic"
ELLIPTIC = "elliptic"


def classify(M: Mat2) -> str:
    t = M.trace()
    s = (t * t - 4).sign()
    if s > 0:
        return HYPERBOLIC
    if s == 0:
        return PARABOLIC
    return ELLIPTIC


def fixed_points(M: Mat2) -> Tuple[QElem, QElem]:
    if classify(M) != HYPERBOLIC:
        raise NotHyperbolic(f"{M} no es hiperbólica")
    if M.c.is_zero():
        raise FixedPointAtInfinity(f"c = 0 en {M}")
    t = M.trace()
    ext = quadratic_extension(t * t - 4)
    inv2c = (2 * M.c).inverse()
    alpha = QElem(ext, (M.a - M.d) * inv2c, inv2c)
    return alpha, alpha.conj()


def mobius(M: Mat2, x: Point) -> Point:
    if x is INFINITY:
        if M.c.is_zero():
            return INFINITY
        return M.a / M.c
    den = M.c * x + M.d
    if den.is_zero():
        return INFINITY
    return (M.a * x + M.b) / den


# ================== FORMAS ==================
class BQF:
    """Q(x,y) = Ax² + Bxy + Cy² con coeficientes en Q(λ_p); D = B² - 4AC."""

    __slots__ = ("A", "B", "C", "D")

    def __init__(self, A: NFElem, B: NFElem, C: NFElem):
        ctx = A.ctx
        self.A, self.B, self.C = A, ctx.coerce(B), ctx.coerce(C)
        self.D = self.B * self.B - 4 * self.A * self.C

    @property
    def ctx(self) -> NFContext:
        return self.A.ctx

    def coefficients(self) -> Tuple[NFElem, NFElem, NFElem]:
        return self.A, self.B, self.C

    def __neg__(self) -> "BQF":
        return BQF(-self.A, -self.B, -self.C)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BQF):
            return NotImplemented
        return self.coefficients() == other.coefficients()

    def __hash__(self):
        return hash(tuple(x.coeffs for x in self.coefficients()))

    def is_hyperbolic(self) -> bool:
        return self.D.sign() == 1

    def tag(self) -> str:
        """Serialización canónica compacta; su orden lexicográfico fija class_tag."""
        return json.dumps([[rational_str(c) for c in x.coeffs] for x in self.coefficients()],
                          separators=(",", ":"))

    def monic_key(self) -> Tuple[tuple, tuple]:
        """(B/A, C/A): polinomio mónico con las mismas raíces."""
        inv = self.A.inverse()
        return (self.B * inv).coeffs, (self.C * inv).coeffs

    def __repr__(self) -> str:
        return f"BQF[{self.A}, {self.B}, {self.C}]"


def make_bqf(ctx: NFContext, A, B, C) -> BQF:
    return BQF(ctx.coerce(A), ctx.coerce(B), ctx.coerce(C))


def act(Q: BQF, M: Mat2) -> BQF:
    """(Q∘M)(x,y) = Q(ax+by, cx+dy)."""
    a, b, c, d = M.entries()
    A, B, C = Q.coefficients()
    return BQF(
        A * a * a + B * a * c + C * c * c,
        2 * A * a * b + B * (a * d + b * c) + 2 * C * c * d,
        A * b * b + B * b * d + C * d * d,
    )


def _content(values: List[NFElem]):
    """Contenido racional positivo (solo tiene sentido con entradas racionales)."""
    g = QQ.zero
    for v in values:
        g = QQ.gcd(g, v.rational())
    return g


@lru_cache(maxsize=None)
def _content_fallback(p: int) -> None:
    # Una sola vez por p: fuera de p=3 no se reduce por el contenido (g = 1)
    log_json(evt="content_fallback", p=p, g=1)


def form_from_matrix(M: Mat2, branch: str = "+") -> BQF:
    if classify(M) != HYPERBOLIC:
        raise NotHyperbolic(f"{M} no es hiperbólica")
    if branch not in ("+", "-"):
        raise SpecError(f"rama inválida: {branch!r}")
    entries = [M.c, M.d - M.a, -M.b]
    if M.ctx.p == 3:
        g = _content(entries)
        entries = [e / M.ctx.coerce(g) for e in entries]
    else:
        _content_fallback(M.ctx.p)
    Q = BQF(*entries)
    return Q if branch == "+" else -Q


def alpha_of(Q: BQF) -> QElem:
    """α_Q = (-B + √D)/(2A)."""
    if Q.A.is_zero():
        raise FixedPointAtInfinity(f"A = 0 en {Q}")
    if not Q.is_hyperbolic():
        raise NotHyperbolic(f"{Q} no es hiperbólica")
    ext = quadratic_extension(Q.D)
    inv2a = (2 * Q.A).inverse()
    return QElem(ext, -Q.B * inv2a, inv2a)


def hecke_conjugate(alpha: QElem) -> QElem:
    return alpha.conj()


def is_simple(Q: BQF) -> bool:
    return Q.A.sign() == 1 and Q.C.sign() == -1


def negated_class_representative(Q: BQF) -> BQF:
    """[-C, B, -A] = (-Q)∘T: forma simple de la clase -A si Q es simple."""
    return BQF(-Q.C, Q.B, -Q.A)
