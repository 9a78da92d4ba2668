import random
from fractions import Fraction

import pytest

from quasident import genmat, idsolve
from quasident.errors import BudgetExceeded, NotAQuasiIdentity, NotOneVariable
from quasident.freealg import QuasiPoly
from quasident.ratpoly import CPoly

x = QuasiPoly.x
c = CPoly.variable


def test_ansatz_size_matches_normal_form():
    assert len(idsolve.MultilinearAnsatz(2, 2)) == 26
    # k=0: 6 permutations; k=1: 6 * 9; k=2: 3 * 81; k=3: 729
    assert len(idsolve.MultilinearAnsatz(3, 3)) == 6 + 54 + 243 + 729


def test_space_2_2_is_spanned_by_Q2():
    space, ansatz = idsolve.multilinear_identity_space(2, 2)
    assert space.dim() == 1
    qvec = ansatz.coordinates(genmat.cayley_hamilton_Q(2))
    assert any(qvec)
    assert space.contains_vector(qvec)


def test_space_3_3_is_spanned_by_Q3():
    space, ansatz = idsolve.multilinear_identity_space(3, 3)
    assert space.dim() == 1
    qvec = ansatz.coordinates(genmat.cayley_hamilton_Q(3))
    assert space.contains_vector(qvec)


def test_low_degree_spaces_are_empty():
    space, _ = idsolve.multilinear_identity_space(3, 2)
    assert space.dim() == 0
    space, _ = idsolve.multilinear_identity_space(2, 1)
    assert space.dim() == 0


def test_solution_vectors_reassemble_to_identities():
    for n, d in ((2, 2), (3, 3)):
        space, ansatz = idsolve.multilinear_identity_space(n, d)
        for v in space.basis:
            p = ansatz.assemble(v)
            assert genmat.is_quasi_identity(p, n)


def test_coordinates_roundtrip():
    rng = random.Random(0)
    ansatz = idsolve.MultilinearAnsatz(2, 2)
    coords = [Fraction(rng.randint(-3, 3)) for _ in range(len(ansatz))]
    p = ansatz.assemble(coords)
    assert ansatz.coordinates(p) == coords


def test_budget_guard():
    with pytest.raises(BudgetExceeded):
        idsolve.multilinear_identity_space(3, 4)


def test_one_variable_divide_unit():
    q2 = genmat.cayley_hamilton_q(2)
    assert idsolve.one_variable_divide(q2, 2) == QuasiPoly.one()


def test_one_variable_divide_shifted():
    q2 = genmat.cayley_hamilton_q(2)
    assert idsolve.one_variable_divide(x(1) * q2, 2) == x(1)


def test_one_variable_divide_coefficient():
    q2 = genmat.cayley_hamilton_q(2)
    coeff = QuasiPoly.const(c(1, 1, 2))
    r = idsolve.one_variable_divide(coeff * q2, 2)
    assert r == coeff
    assert r * q2 == coeff * q2


def test_one_variable_divide_random_products():
    rng = random.Random(1)
    q2 = genmat.cayley_hamilton_q(2)
    for _ in range(20):
        factor = QuasiPoly.zero()
        for _ in range(rng.randint(1, 3)):
            factor = factor + QuasiPoly(
                {(1,) * rng.randint(0, 2): CPoly.const(rng.randint(-3, 3))}
            )
        p = factor * q2
        if p.is_zero():
            continue
        assert idsolve.one_variable_divide(p, 2) * q2 == p


def test_one_variable_divide_rejects_two_variables():
    with pytest.raises(NotOneVariable):
        idsolve.one_variable_divide(x(1) * x(2), 2)


def test_one_variable_divide_rejects_non_identities():
    with pytest.raises(NotAQuasiIdentity):
        idsolve.one_variable_divide(x(1) * x(1), 2)


def test_powers_of_one_variable_dependent():
    report = idsolve.local_lin_dep([QuasiPoly.one(), x(1), x(1) * x(1)], 2)
    assert report.verdict == "dependent"
    assert report.mode == "symbolic"
    assert report.witness["capelli"] == "C_5"


def test_one_and_x_independent():
    report = idsolve.local_lin_dep([QuasiPoly.one(), x(1)], 2)
    assert report.verdict == "independent"
    assert "point" in report.witness and "values" in report.witness


def test_x1_x2_independent():
    report = idsolve.local_lin_dep([x(1), x(2)], 2)
    assert report.verdict == "independent"


def test_powers_dependent_at_2_but_independent_at_3():
    fs = [QuasiPoly.one(), x(1), x(1) * x(1)]
    assert idsolve.local_lin_dep(fs, 2).verdict == "dependent"
    assert idsolve.local_lin_dep(fs, 3).verdict == "independent"


def test_randomized_agrees_with_symbolic():
    rng = random.Random(2)
    x1, x2 = x(1), x(2)
    corpus = [
        [QuasiPoly.one(), x1],
        [QuasiPoly.one(), x1, x1 * x1],
        [x1, x2],
        [x1, x1.scale(3)],
        [x1 * x2, x2 * x1],
        [QuasiPoly.one(), x1, x1 * x1, x1 * x1 * x1],
        [x1 + x2, x1 - x2],
        [x1 * x1, x1 * x1 + QuasiPoly.one()],
    ]
    for fs in corpus:
        symbolic = idsolve.local_lin_dep(fs, 2, mode="symbolic")
        randomized = idsolve.local_lin_dep(
            fs, 2, mode="randomized", seed=rng.randint(0, 10**6), trials=20
        )
        assert symbolic.verdict == randomized.verdict, fs


def test_scalar_coefficient_requirement():
    with pytest.raises(ValueError):
        idsolve.local_lin_dep([QuasiPoly.const(c(1, 1, 1))], 2)
