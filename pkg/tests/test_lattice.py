"""Integer lattices: HNF against an independent oracle, exact LLL invariants,
ideal bases, and smoke runs of the reduction experiments."""

from fractions import Fraction

import numpy as np
import pytest
import sympy
from sympy.matrices.normalforms import hermite_normal_form as sympy_hnf

from bitretrieval.algnorm import algebraic_norm
from bitretrieval.instances import pi_sequence, random_binary
from bitretrieval.lattice import (
    AttackReport,
    ExperimentSummary,
    IntegerLattice,
    LatticeError,
    counterfeit_attack,
    hermite_normal_form,
    hnf_avector,
    ideal_discovery_experiment,
    ideal_generators,
    ideal_ocoord_basis,
    lll_reduce,
    stack,
)


def oracle_hnf(rows):
    """Row-style HNF via sympy's column-style routine.

    Reversing row and column order conjugates one convention into the other:
    rowHNF(A) = rev(colHNF(rev(A^T)))^T.
    """
    M = sympy.Matrix(rows)
    out = M.T[::-1, ::-1]
    out = sympy_hnf(out)
    return out[::-1, ::-1].T.tolist()


def dot_fraction(u, v):
    return sum(a * b for a, b in zip(u, v))


def assert_lll_reduced(rows, delta):
    """Exact rational Gram-Schmidt check of size reduction and Lovasz."""
    delta = Fraction(delta)
    b = [[Fraction(int(x)) for x in r] for r in rows]
    m = len(b)
    bstar = []
    mu = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        v = list(b[i])
        for j in range(i):
            denom = dot_fraction(bstar[j], bstar[j])
            mu[i][j] = dot_fraction(b[i], bstar[j]) / denom
            v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
        bstar.append(v)
    for i in range(m):
        for j in range(i):
            assert abs(mu[i][j]) <= Fraction(1, 2), "not size reduced at (%d, %d)" % (i, j)
    for i in range(1, m):
        lhs = dot_fraction(bstar[i], bstar[i]) + mu[i][i - 1] ** 2 * dot_fraction(bstar[i - 1], bstar[i - 1])
        assert lhs >= delta * dot_fraction(bstar[i - 1], bstar[i - 1]), "Lovasz fails at %d" % i


# ---------------------------------------------------------------------------
# containers


def test_lattice_row_validation():
    with pytest.raises(LatticeError):
        IntegerLattice(3, [[1, 2]])
    with pytest.raises(LatticeError):
        IntegerLattice(3, [[1, 2, 3]], scale=3)  # scaled rows must sum to 0
    L = IntegerLattice(3, [[1, 2, -3]], scale=3)
    assert L.rows == ((1, 2, -3),)


def test_stack_requires_matching_ambient():
    a = IntegerLattice(3, [[1, 0, 0]])
    b = IntegerLattice(3, [[0, 1, 0]])
    assert stack(a, b).rows == ((1, 0, 0), (0, 1, 0))
    with pytest.raises(LatticeError):
        stack(a, IntegerLattice(4, [[0, 1, 0, 0]]))
    with pytest.raises(LatticeError):
        stack(a, IntegerLattice(3, [[0, 1, -1]], scale=3))


# ---------------------------------------------------------------------------
# Hermite normal form


def test_hnf_matches_independent_oracle():
    rng = np.random.default_rng(2)
    done = 0
    while done < 8:
        dim = 5 if done < 5 else 7
        rows = rng.integers(-9, 10, size=(dim, dim)).tolist()
        if sympy.Matrix(rows).det() == 0:
            continue
        ours = [list(r) for r in hermite_normal_form(IntegerLattice(dim, rows)).rows]
        assert ours == oracle_hnf(rows)
        done += 1


def test_hnf_idempotent_and_order_free():
    rng = np.random.default_rng(3)
    rows = rng.integers(-20, 21, size=(6, 6)).tolist()
    h1 = hermite_normal_form(IntegerLattice(6, rows))
    h2 = hermite_normal_form(h1)
    assert h1.rows == h2.rows
    shuffled = [rows[i] for i in (3, 0, 5, 1, 4, 2)]
    h3 = hermite_normal_form(IntegerLattice(6, shuffled))
    assert h1.rows == h3.rows


def test_hnf_unimodular_invariance():
    rng = np.random.default_rng(4)
    rows = rng.integers(-9, 10, size=(5, 5))
    if sympy.Matrix(rows.tolist()).det() == 0:
        rows[0, 0] += 1
    # random elementary row operations preserve the lattice
    mixed = rows.astype(object).copy()
    for _ in range(20):
        i, j = rng.integers(0, 5, size=2)
        if i != j:
            mixed[i] = mixed[i] + int(rng.integers(-3, 4)) * mixed[j]
    h1 = hermite_normal_form(IntegerLattice(5, rows.tolist()))
    h2 = hermite_normal_form(IntegerLattice(5, mixed.tolist()))
    assert h1.rows == h2.rows


def test_hnf_handles_dependent_rows():
    base = [[2, 0, 1], [0, 3, 1]]
    dep = base + [[2, 3, 2], [4, 3, 3]]  # integer combinations of the first two
    h_base = hermite_normal_form(IntegerLattice(3, base))
    h_dep = hermite_normal_form(IntegerLattice(3, dep))
    assert h_base.rows == h_dep.rows


def test_hnf_modular_shortcut_agrees():
    rng = np.random.default_rng(5)
    rows = rng.integers(-9, 10, size=(6, 6)).tolist()
    det = int(sympy.Matrix(rows).det())
    if det == 0:
        rows[0][0] += 1
        det = int(sympy.Matrix(rows).det())
    plain = hermite_normal_form(IntegerLattice(6, rows))
    mod = hermite_normal_form(IntegerLattice(6, rows), modulus=abs(det))
    assert plain.rows == mod.rows


def test_ideal_index_equals_algebraic_norm():
    # [O : beta O] = |N(beta)|: product of the HNF diagonal
    key = random_binary(13, seed=1)
    h = hermite_normal_form(ideal_ocoord_basis(key))
    diag = 1
    for i, row in enumerate(h.rows):
        diag *= row[i]
    assert diag == abs(algebraic_norm(key.element))


def test_ideal_generators_scaled_form(pi23):
    L = ideal_generators(pi23.element)
    assert L.scale == 23
    assert L.n == 23
    assert len(L.rows) == 22
    assert all(sum(r) == 0 for r in L.rows)


def test_hnf_avector_reproduces_published_instance(pi23):
    d, avec = hnf_avector(pi23)
    assert d == 274621
    assert d == algebraic_norm(pi23.element)
    assert avec == [
        274620, 218518, 159293, 98597, 171309, 37690, 214991, 11132, 50442,
        252742, 78333, 231057, 55808, 42203, 207268, 79601, 242822, 193340,
        248383, 212667, 72735, 58266,
    ]
    assert avec[0] + 1 == d


# ---------------------------------------------------------------------------
# LLL


def test_lll_invariants_random_basis():
    rng = np.random.default_rng(6)
    rows = rng.integers(-50, 51, size=(8, 8)).tolist()
    if sympy.Matrix(rows).det() == 0:
        rows[0][0] += 1
    for delta in (Fraction(3, 4), Fraction(99, 100)):
        red = lll_reduce(IntegerLattice(8, rows), delta=delta)
        assert_lll_reduced(red.rows, delta)
        # reduction must not change the lattice
        assert hermite_normal_form(red).rows == hermite_normal_form(IntegerLattice(8, rows)).rows


def test_lll_invariants_ideal_basis():
    key = random_binary(17, seed=2)
    h = hermite_normal_form(ideal_ocoord_basis(key))
    red = lll_reduce(h, delta=0.99)
    assert_lll_reduced(red.rows, Fraction(99, 100))
    assert hermite_normal_form(red).rows == h.rows


def test_lll_first_vector_bound():
    rng = np.random.default_rng(7)
    rows = rng.integers(-30, 31, size=(9, 9)).tolist()
    det = abs(int(sympy.Matrix(rows).det()))
    if det == 0:
        rows[0][0] += 1
        det = abs(int(sympy.Matrix(rows).det()))
    red = lll_reduce(IntegerLattice(9, rows), delta=0.99)
    shortest = min(sum(x * x for x in r) for r in red.rows)
    assert shortest <= 2.0 ** 8 * det ** (2.0 / 9) * (1 + 1e-9)


def test_lll_vanilla_row_order():
    key = random_binary(13, seed=3)
    h = hermite_normal_form(ideal_ocoord_basis(key))
    red = lll_reduce(h, delta=0.75, progressive=False, sort_rows=False)
    assert_lll_reduced(red.rows, Fraction(3, 4))
    assert hermite_normal_form(red).rows == h.rows


def test_lll_delta_range():
    L = IntegerLattice(2, [[1, 0], [0, 1]])
    with pytest.raises(LatticeError):
        lll_reduce(L, delta=1.0)
    with pytest.raises(LatticeError):
        lll_reduce(L, delta=0.25)


# ---------------------------------------------------------------------------
# reduction experiments (smoke level; the calibrated bands live in the
# acceptance suite)


def test_counterfeit_attack_report_shape():
    rep = counterfeit_attack(23, seed=1, trials=3)
    assert isinstance(rep, AttackReport)
    assert rep.n == 23 and rep.trials == 3
    assert len(rep.ratios) == 3
    assert all(r > 0 for r in rep.ratios)
    assert rep.best_ratio == min(rep.ratios)


def test_counterfeit_attack_deterministic():
    r1 = counterfeit_attack(23, seed=4, trials=2)
    r2 = counterfeit_attack(23, seed=4, trials=2)
    assert r1.ratios == r2.ratios


def test_ideal_discovery_smoke():
    rep = ideal_discovery_experiment(29, seed=1, trials=6)
    assert isinstance(rep, ExperimentSummary)
    assert rep.trials == 6
    assert 0 <= rep.successes <= 6
    assert rep.success_rate == rep.successes / 6
    # at this size the reduction recovers the planted key nearly always
    assert rep.success_rate >= 0.5
