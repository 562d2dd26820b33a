import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st
from sympy.polys.domains import QQ

from hecke.errors import FieldDivisionByZero, PoleProximity, SpecError
from hecke.heckealg import alpha_of, generators, make_bqf, word_matrix
from hecke.numberfield import interval_context, make_context, quadratic_extension
from hecke.ratfunc import (
    RatFunc,
    eval_numeric,
    inverse_form_power,
    literal_power_ratfunc,
    p_divmod,
    p_gcd,
    p_mul,
    p_taylor_shift,
    principal_part,
    q_k_alpha,
    slash,
)


def rf(ctx, num, den, reduce=True):
    return RatFunc(ctx, [ctx.coerce(c) for c in num], [ctx.coerce(c) for c in den], reduce=reduce)


def test_reduction_and_monic_denominator(ctx3):
    # (z² - 1) / (2z - 2) = (z + 1)/2
    f = rf(ctx3, [-1, 0, 1], [-2, 2])
    assert f.den == [ctx3.one()]
    assert f.num == [ctx3.coerce(QQ(1, 2)), ctx3.coerce(QQ(1, 2))]


def test_zero_denominator(ctx3):
    with pytest.raises(FieldDivisionByZero):
        rf(ctx3, [1], [0])


def test_poly_gcd_and_division(ctx5):
    lam = ctx5.lam()
    a = [-lam, ctx5.one()]            # z - λ
    b = [ctx5.one(), ctx5.one()]      # z + 1
    f = p_mul(a, b)
    q, r = p_divmod(f, a)
    assert r == [] and q == b
    assert p_gcd(f, p_mul(a, a)) == a


def test_taylor_shift(ctx3):
    # (w + 2)² = w² + 4w + 4
    f = [ctx3.zero(), ctx3.zero(), ctx3.one()]
    assert p_taylor_shift(f, ctx3.coerce(2)) == [ctx3.coerce(c) for c in (4, 4, 1)]


def test_arithmetic_and_equality(ctx5):
    f = rf(ctx5, [1], [0, 1])                 # 1/z
    g = rf(ctx5, [1], [-1, 1])                # 1/(z-1)
    h = f + g
    assert h == rf(ctx5, [-1, 2], [0, -1, 1])
    assert h - g == f
    assert (f * g) == rf(ctx5, [1], [0, -1, 1])
    assert (f * ctx5.lam()) == rf(ctx5, [ctx5.lam()], [0, 1])


def test_slash_one_over_z(ctx3):
    _, T, _ = generators(ctx3)
    f = rf(ctx3, [1], [0, 1])
    assert slash(f, T, 1) == rf(ctx3, [-1], [0, 1])


@pytest.mark.parametrize("p", [3, 5])
def test_slash_is_an_action(p):
    ctx = make_context(p)
    f = rf(ctx, [1, 2], [ctx.coerce(-1), ctx.lam(), 0, 1])
    M, N = word_matrix(ctx, "SU"), word_matrix(ctx, "TuS")
    for k in (1, 2):
        assert slash(slash(f, M, k), N, k) == slash(f, M * N, k)


small_ints = st.integers(-4, 4)
small_polys = st.lists(small_ints, min_size=1, max_size=3)
slash_words = st.text(alphabet="SsTUu", max_size=5)


def random_ratfunc(ctx, num, den_tail):
    # denominador mónico: nunca nulo
    return rf(ctx, num, list(den_tail) + [1])


@hsettings(max_examples=25, deadline=None)
@given(st.integers(3, 6), small_polys, small_polys, small_polys, small_polys,
       slash_words, st.integers(1, 3), small_ints)
def test_slash_is_linear(p, n1, d1, n2, d2, w, k, c):
    ctx = make_context(p)
    f, g = random_ratfunc(ctx, n1, d1), random_ratfunc(ctx, n2, d2)
    M = word_matrix(ctx, w)
    assert slash(f + g, M, k) == slash(f, M, k) + slash(g, M, k)
    assert slash(f * c, M, k) == slash(f, M, k) * c


@hsettings(max_examples=25, deadline=None)
@given(st.integers(3, 6), small_polys, small_polys, slash_words, slash_words, st.integers(1, 3))
def test_slash_of_product_is_iterated_slash(p, num, den, w1, w2, k):
    ctx = make_context(p)
    f = random_ratfunc(ctx, num, den)
    M, N = word_matrix(ctx, w1), word_matrix(ctx, w2)
    assert slash(f, M * N, k) == slash(slash(f, M, k), N, k)


def test_slash_rejects_bad_weight(ctx3):
    _, T, _ = generators(ctx3)
    with pytest.raises(SpecError):
        slash(rf(ctx3, [1], [0, 1]), T, 0)


def test_principal_part_at_zero(ctx3):
    pp = principal_part(rf(ctx3, [1], [0, 0, 1]), 0)
    assert pp.order == 2
    assert pp.coeffs == (ctx3.one(), ctx3.zero())


def test_principal_part_regular_point(ctx3):
    assert principal_part(rf(ctx3, [1], [0, 0, 1]), 1).is_empty()


def test_principal_part_golden(ctx3, golden):
    f = inverse_form_power(golden, 1)
    alpha = alpha_of(golden)
    pp = principal_part(f, alpha)
    assert pp.order == 1
    assert pp.leading == alpha.ext.sqrt_D().inverse()
    assert pp.leading == (2 * alpha - 1).inverse()


@pytest.mark.parametrize("k", [1, 2, 3])
def test_q_k_alpha_matches_literal_function(ctx3, golden, k):
    canon = q_k_alpha(ctx3, golden, k)
    literal = literal_power_ratfunc(golden, k)
    assert principal_part(literal, canon.alpha) == canon
    assert canon.leading == 1


@pytest.mark.parametrize("k", [1, 2, 3])
def test_q_k_alpha_at_conjugate(ctx5, k):
    Q = make_bqf(ctx5, 1, -ctx5.lam(), -1)
    at_c = q_k_alpha(ctx5, Q, k, "alpha_prime")
    literal = literal_power_ratfunc(Q, k)
    expected = principal_part(literal, at_c.alpha)
    assert expected == at_c.scaled(at_c.alpha.ext.coerce((-1) ** k))
    assert at_c.coeffs == tuple(c.conj() for c in q_k_alpha(ctx5, Q, k).coeffs)


def test_q_k_alpha_bad_point(ctx3, golden):
    with pytest.raises(SpecError):
        q_k_alpha(ctx3, golden, 1, "beta")


def test_principal_part_at_rational_square_D(ctx4):
    # D = 4: α = 1 y α' = -1 viven en Q(λ_4)
    Q = make_bqf(ctx4, 1, 0, -1)
    alpha = alpha_of(Q)
    assert alpha.ext.specialize(alpha) == ctx4.one()
    pp = principal_part(inverse_form_power(Q, 1), alpha)
    assert pp.order == 1
    assert pp.leading == alpha.ext.coerce(ctx4.coerce(QQ(1, 2)))
    pp_neg = principal_part(inverse_form_power(Q, 1), alpha.conj())
    assert pp_neg.leading == alpha.ext.coerce(ctx4.coerce(QQ(-1, 2)))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_q_k_alpha_at_rational_square_D(ctx4, k):
    Q = make_bqf(ctx4, 1, 0, -1)
    alpha = alpha_of(Q)
    assert principal_part(literal_power_ratfunc(Q, k), alpha) == q_k_alpha(ctx4, Q, k, "alpha")
    pp = q_k_alpha(ctx4, Q, k, "alpha")
    assert principal_part(pp.as_ratfunc(), alpha) == pp


def test_principal_part_as_ratfunc_roundtrip(ctx3, golden):
    f = inverse_form_power(golden, 2)
    alpha = alpha_of(golden)
    pp = principal_part(f, alpha)
    rest = f.lift(alpha.ext).add(-pp.as_ratfunc())
    assert principal_part(rest, alpha).is_empty()


def test_evaluate_exact(ctx3, golden):
    f = inverse_form_power(golden, 1)
    assert f.evaluate(ctx3.coerce(3)) == QQ(1, 5)
    assert RatFunc.const(ctx3, 1).evaluate(ctx3.coerce(7)) == 1


def test_at_infinity(ctx3):
    assert rf(ctx3, [-1, 0, 0, 0, 1], [0, 0, 0, 0, 1]).at_infinity() == 1
    assert rf(ctx3, [1], [0, 1]).at_infinity() == 0
    assert rf(ctx3, [0, 0, 1], [1, 1]).at_infinity() is None


def test_eval_numeric(ctx3, golden):
    # Q(3, 1) = 5
    bits = 200
    v = eval_numeric(inverse_form_power(golden, 1), 3, bits)
    iv = interval_context(bits)
    tol = iv.mpf(1) / iv.mpf(2 ** (bits - 8))
    assert (abs(v.real - iv.mpf(1) / 5) < tol) is True
    assert (v.real.delta < tol) is True
    assert (abs(v.imag) < tol) is True
    with pytest.raises(PoleProximity):
        eval_numeric(rf(ctx3, [1], [0, 1]), 0, 100)


def test_descend_and_pure_sqrt_multiple(ctx3):
    ext = quadratic_extension(ctx3.coerce(5))
    s = ext.sqrt_D()
    f = RatFunc(ext, [s], [ext.coerce(-1), ext.zero(), ext.one()], reduce=False)
    assert f.descend() is None
    assert f.is_pure_sqrt_multiple()
    g = (f * s).descend()
    assert g == rf(ctx3, [5], [-1, 0, 1])
