import pytest
from hypothesis import assume, given, settings as hsettings
from hypothesis import strategies as st
from sympy.polys.domains import QQ

from hecke.errors import FixedPointAtInfinity, NotHyperbolic, NotInGroup, SpecError
from hecke.heckealg import (
    ELLIPTIC,
    HYPERBOLIC,
    PARABOLIC,
    Mat2,
    act,
    alpha_of,
    classify,
    fixed_points,
    form_from_matrix,
    generators,
    hecke_conjugate,
    invert_word,
    is_simple,
    make_bqf,
    mobius,
    negated_class_representative,
    u_power_table,
    word_matrix,
)
from hecke.numberfield import make_context, same_value


def mat(ctx, a, b, c, d):
    return Mat2(*(ctx.coerce(x) for x in (a, b, c, d)))


@pytest.mark.parametrize("p", range(3, 13))
def test_group_relations(p):
    ctx = make_context(p)
    S, T, U = generators(ctx)
    assert (T * T).is_identity()
    assert U.power(p).is_identity()
    assert not U.power(p - 1).is_identity()
    assert (S * T).projectively_equal(U)


words = st.text(alphabet="SsTUu", max_size=8)


@hsettings(max_examples=60, deadline=None)
@given(st.integers(3, 12), words)
def test_words_have_determinant_one(p, w):
    assert word_matrix(make_context(p), w).det() == 1


@hsettings(max_examples=40, deadline=None)
@given(st.integers(3, 12), words, words)
def test_word_trail_reproduces_entries(p, w1, w2):
    ctx = make_context(p)
    M = word_matrix(ctx, w1) * word_matrix(ctx, w2).inverse()
    assert M.word == w1 + invert_word(w2)
    # T⁻¹ = -T: la palabra reproduce la matriz salvo signo
    assert word_matrix(ctx, M.word).projectively_equal(M)
    assert word_matrix(ctx, M.inverse().word).projectively_equal(M.inverse())


@pytest.mark.parametrize("p", range(3, 13))
def test_positive_entries_of_branch_blocks(p):
    ctx = make_context(p)
    _, T, _ = generators(ctx)
    for n in range(1, p):
        M = u_power_table(ctx, n) * T
        signs = [x.sign() for x in M.entries()]
        assert all(s >= 0 for s in signs) or all(s <= 0 for s in signs)
        if n == 1:
            assert M.c.is_zero()
        elif n == p - 1:
            assert M.b.is_zero()
        else:
            assert 0 not in signs


def test_u_power_table(ctx5):
    lam = ctx5.lam()
    assert u_power_table(ctx5, 0).is_identity()
    U1 = u_power_table(ctx5, 1)
    assert U1.entries() == (lam, -ctx5.one(), ctx5.one(), ctx5.zero())
    assert u_power_table(ctx5, 2).a == lam * lam - 1
    with pytest.raises(SpecError):
        u_power_table(ctx5, 6)


def test_inverse_word_and_matrix(ctx5):
    M = word_matrix(ctx5, "STuS")
    assert (M * M.inverse()).is_identity()
    assert M.inverse().word == "sUTs"


def test_det_check(ctx3):
    with pytest.raises(NotInGroup):
        mat(ctx3, 2, 0, 0, 1)


def test_classify(ctx3):
    S, T, _ = generators(ctx3)
    assert classify(T) == ELLIPTIC
    assert classify(S) == PARABOLIC
    assert classify(mat(ctx3, 2, 1, 1, 1)) == HYPERBOLIC


def test_fixed_points_golden(ctx3):
    M = mat(ctx3, 2, 1, 1, 1)
    alpha, alpha_c = fixed_points(M)
    half = ctx3.coerce(QQ(1, 2))
    assert alpha.u == half and alpha.v == half
    assert alpha_c == alpha.conj()
    assert mobius(M, alpha) == alpha
    assert mobius(M, alpha_c) == alpha_c


def test_fixed_points_errors(ctx3):
    S, T, _ = generators(ctx3)
    with pytest.raises(NotHyperbolic):
        fixed_points(T)
    with pytest.raises(FixedPointAtInfinity):
        fixed_points(mat(ctx3, 2, 1, 0, QQ(1, 2)))


def test_form_from_matrix(ctx3):
    M = mat(ctx3, 2, 1, 1, 1)
    assert form_from_matrix(M, "+") == make_bqf(ctx3, 1, -1, -1)
    assert form_from_matrix(M, "-") == make_bqf(ctx3, -1, 1, 1)
    # M² = [[5,3],[3,2]]: contenido 3
    M2 = M * M
    assert M2.entries() == tuple(ctx3.coerce(x) for x in (5, 3, 3, 2))
    Q = form_from_matrix(M2, "+")
    assert Q == make_bqf(ctx3, 1, -1, -1)
    # M² tiene D = 45 = 9·5: mismo punto con otro discriminante
    assert same_value(alpha_of(Q), fixed_points(M2)[0])


def test_alpha_and_conjugate(golden):
    alpha = alpha_of(golden)
    assert alpha.sign() == 1
    assert hecke_conjugate(alpha).sign() == -1
    assert alpha.ext.D == 5


def test_is_simple(ctx3, golden):
    assert is_simple(golden)
    assert not is_simple(make_bqf(ctx3, -1, 1, 1))
    assert not is_simple(make_bqf(ctx3, 1, -3, 1))


def random_form(ctx, a, b, c, shift):
    return make_bqf(ctx, a, ctx.coerce(b) + ctx.lam() * shift, c)


coef = st.integers(-6, 6)


@hsettings(max_examples=60, deadline=None)
@given(st.integers(3, 7), coef, coef, coef, st.integers(-2, 2))
def test_is_simple_iff_alpha_straddles_zero(p, a, b, c, shift):
    ctx = make_context(p)
    Q = random_form(ctx, a, b, c, shift)
    assume(a != 0 and Q.is_hyperbolic())
    alpha = alpha_of(Q)
    straddles = hecke_conjugate(alpha).sign() == -1 and alpha.sign() == 1
    assert is_simple(Q) == straddles


@hsettings(max_examples=40, deadline=None)
@given(st.integers(3, 7), coef, coef, coef, st.integers(-2, 2), words)
def test_hecke_conjugation_commutes_with_action(p, a, b, c, shift, w):
    ctx = make_context(p)
    Q = random_form(ctx, a, b, c, shift)
    assume(a != 0 and Q.is_hyperbolic())
    alpha = alpha_of(Q)
    assume(not alpha.ext.rational_square)
    V = word_matrix(ctx, w)
    assert hecke_conjugate(mobius(V, alpha)) == mobius(V, hecke_conjugate(alpha))


def test_action_preserves_discriminant(ctx5):
    Q = make_bqf(ctx5, 1, ctx5.lam(), -2)
    for word in ["S", "T", "U", "STu", "UUT"]:
        assert act(Q, word_matrix(ctx5, word)).D == Q.D


def test_action_composes(ctx5):
    Q = make_bqf(ctx5, 1, ctx5.lam(), -2)
    M, N = word_matrix(ctx5, "SU"), word_matrix(ctx5, "Ts")
    assert act(act(Q, M), N) == act(Q, M * N)


def test_alpha_transforms_by_inverse(ctx5):
    Q = make_bqf(ctx5, 1, ctx5.lam(), -2)
    V = word_matrix(ctx5, "US")
    assert alpha_of(act(Q, V)) == mobius(V.inverse(), alpha_of(Q))


def test_negated_class_representative(golden, ctx3):
    _, T, _ = generators(ctx3)
    assert negated_class_representative(golden) == act(-golden, T)
