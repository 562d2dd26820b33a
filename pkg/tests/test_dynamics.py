import pytest
from sympy.polys.domains import QQ

from hecke.dynamics import (
    branch_breakpoints,
    branch_by_interval,
    cycle_from,
    enumerate_classes,
    irreducible_pole_set,
    is_symmetric_class,
    neg_poles_identity,
    phi,
    phi_on_form,
    reduce_to_cycle,
)
from hecke.errors import CycleLimitExceeded, InvariantViolation, NotSimple
from hecke.heckealg import INFINITY, act, alpha_of, make_bqf, mobius, u_power_table, word_matrix
from hecke.numberfield import QElem, make_context, quadratic_extension

GOLDEN_TAG = '[["1/1"],["-1/1"],["-1/1"]]'


def golden_point(ctx, u, v):
    ext = quadratic_extension(ctx.coerce(5))
    return QElem(ext, ctx.coerce(u), ctx.coerce(v))


def test_phi_branches_p3(ctx3):
    half = QQ(1, 2)
    x = golden_point(ctx3, half, half)
    n, y = phi(ctx3, x)
    assert n == 2
    assert y == golden_point(ctx3, -half, half)
    n, y2 = phi(ctx3, y)
    assert n == 1
    assert y2 == x


def test_phi_requires_positive(ctx3):
    half = QQ(1, 2)
    with pytest.raises(InvariantViolation):
        phi(ctx3, golden_point(ctx3, half, -half))


def test_branch_breakpoints_p3(ctx3):
    bps = branch_breakpoints(ctx3)
    assert bps[0] is INFINITY
    assert bps[1] == 1
    assert bps[2] == 0


def test_phi_on_form_golden(ctx3, golden):
    n, Q1 = phi_on_form(ctx3, golden)
    assert (n, Q1) == (2, make_bqf(ctx3, 1, 1, -1))
    n, Q2 = phi_on_form(ctx3, Q1)
    assert (n, Q2) == (1, golden)


def test_phi_on_form_rejects_non_simple(ctx3):
    with pytest.raises(NotSimple):
        phi_on_form(ctx3, make_bqf(ctx3, 1, -3, 1))


def test_golden_cycle(ctx3, golden):
    cyc = cycle_from(ctx3, golden)
    assert cyc.forms == (golden, make_bqf(ctx3, 1, 1, -1))
    assert cyc.exponents == (2, 1)
    assert cyc.pole_steps == (1, 2)
    assert cyc.class_tag == GOLDEN_TAG
    assert cyc.discriminant == 5
    assert len(cyc) == 2


def test_cycle_exponents_match_branches(ctx3, golden):
    cyc = cycle_from(ctx3, golden)
    for Q, n in zip(cyc.forms, cyc.exponents):
        assert branch_by_interval(ctx3, alpha_of(Q)) == n


@pytest.mark.parametrize("p", [3, 4, 5])
def test_exponents_and_pole_steps_move_the_poles(p):
    ctx = make_context(p)
    T = word_matrix(ctx, "T")
    for cyc in enumerate_classes(ctx, 3):
        alphas = cyc.alphas()
        if alphas[0].ext.rational_square:
            continue
        L = len(cyc)
        for i, (n, j) in enumerate(zip(cyc.exponents, cyc.pole_steps)):
            nxt = alphas[(i + 1) % L]
            assert mobius(word_matrix(ctx, "T" + "U" * n), alphas[i]) == nxt
            # al revés: α_i = U^j T α_{i+1}
            assert mobius(u_power_table(ctx, j) * T, nxt) == alphas[i]


def test_fixing_matrix_fixes_alpha(ctx3, golden):
    cyc = cycle_from(ctx3, golden)
    for i, alpha in enumerate(cyc.alphas()):
        M = cyc.fixing_matrix(i)
        assert not M.is_identity()
        assert mobius(M, alpha) == alpha
        assert mobius(M, alpha.conj()) == alpha.conj()


def test_cycle_limit(ctx3, golden):
    with pytest.raises(CycleLimitExceeded):
        cycle_from(ctx3, golden, max_steps=1)


def test_cycle_rejects_non_simple(ctx3):
    with pytest.raises(NotSimple):
        cycle_from(ctx3, make_bqf(ctx3, -1, 1, 1))


def test_reduce_to_cycle_from_equivalent_form(ctx3, golden):
    Q = act(golden, word_matrix(ctx3, "SS"))
    assert Q == make_bqf(ctx3, 1, 3, 1)
    assert reduce_to_cycle(ctx3, Q).class_tag == GOLDEN_TAG


def test_irreducible_pole_set_golden(ctx3, golden):
    positives, negatives = irreducible_pole_set(ctx3, golden)
    half = QQ(1, 2)
    assert positives == [golden_point(ctx3, half, half), golden_point(ctx3, -half, half)]
    assert set(negatives) == {golden_point(ctx3, half, -half), golden_point(ctx3, -half, -half)}


def test_symmetry_golden(ctx3, golden):
    assert is_symmetric_class(ctx3, golden)
    assert neg_poles_identity(ctx3, golden)


def test_asymmetric_class_p3(ctx3):
    # x² - 6y²: sin unidades de norma -1 en Q(√6), la clase negada es otra
    Q = make_bqf(ctx3, 1, -4, -2)
    cyc = cycle_from(ctx3, Q)
    assert len(cyc) == 6
    assert not is_symmetric_class(ctx3, Q)
    assert neg_poles_identity(ctx3, Q)


def test_enumerate_contains_golden(ctx3):
    classes = enumerate_classes(ctx3, 2)
    tags = [c.class_tag for c in classes]
    assert GOLDEN_TAG in tags
    assert tags == sorted(tags)
    golden = next(c for c in classes if c.class_tag == GOLDEN_TAG)
    assert golden.symmetric is True


@pytest.mark.parametrize("p,word_len", [
    (3, 3), (4, 3), (5, 3),
    (3, 6),
    pytest.param(4, 6, marks=pytest.mark.slow),
    pytest.param(5, 6, marks=pytest.mark.slow),
])
def test_neg_poles_identity_on_enumerated_classes(p, word_len):
    ctx = make_context(p)
    classes = enumerate_classes(ctx, word_len)
    assert classes
    for cyc in classes:
        assert neg_poles_identity(ctx, cyc.forms[0])
        for Q, n in zip(cyc.forms, cyc.exponents):
            assert branch_by_interval(ctx, alpha_of(Q)) == n


@pytest.mark.parametrize("p", [4, 5])
def test_enumeration_is_deterministic(p):
    ctx = make_context(p)
    first = [c.class_tag for c in enumerate_classes(ctx, 3)]
    second = [c.class_tag for c in enumerate_classes(ctx, 3, with_symmetry=False)]
    assert first == second
