import itertools
import random
from fractions import Fraction

import pytest

from quasident import antisym as anti
from quasident.errors import BudgetExceeded, DimensionMismatch, WrongDegree
from quasident.exactla import QMatrix, Subspace


# -- independent oracles -------------------------------------------------------


def oracle_sign_and_normal_form(letters, n):
    """Brute-force normal ordering of a word in the letters ('T', h), 'X', 'Y'.

    Bubble-sorts the word into (T ascending, X block, Y block) counting one
    sign flip per swap of distinct odd letters; X and Y commute with
    themselves for free.  Returns (sign, tset, i, j) or None when the word
    dies (repeated T, exponent overflow, degree overflow).
    """
    word = list(letters)

    def rank(letter):
        if letter[0] == "T":
            return (0, letter[1])
        return (1, 0) if letter == "X" else (2, 0)

    sign = 1
    changed = True
    while changed:
        changed = False
        for pos in range(len(word) - 1):
            a, b = word[pos], word[pos + 1]
            if rank(a) > rank(b):
                word[pos], word[pos + 1] = b, a
                if a != b:
                    sign = -sign
                changed = True
    tset = tuple(h for kind, h in [w for w in word if w[0] == "T"])
    if len(set(tset)) != len(tset):
        return None
    i = word.count("X")
    j = word.count("Y")
    if i >= 2 * n or j >= 2 * n:
        return None
    degree = sum(2 * h + 1 for h in tset) + i + j
    if degree > n * n:
        return None
    return sign, tset, i, j


def monomial_letters(m):
    tset, i, j = m
    return [("T", h) for h in tset] + ["X"] * i + ["Y"] * j


def oracle_atilde_basis(n, degree):
    """Enumerate normal-form monomials degree by filtering the full cube."""
    out = []
    t_indices = range(1, n - 1)
    for r in range(n - 1):
        for tset in itertools.combinations(t_indices, r):
            for i in range(2 * n):
                for j in range(2 * n):
                    m = (tset, i, j)
                    if (
                        sum(2 * h + 1 for h in tset) + i + j == degree
                        and degree <= n * n
                    ):
                        out.append(m)
    return sorted(out)


# -- formal algebra ------------------------------------------------------------


def test_atilde_basis_n2():
    assert anti.atilde_basis(2, 1) == [((), 0, 1), ((), 1, 0)]
    assert anti.atilde_basis(2, 4) == [((), 1, 3), ((), 2, 2), ((), 3, 1)]


def test_atilde_basis_n3_top_degree():
    basis = anti.atilde_basis(3, 9)
    assert basis == oracle_atilde_basis(3, 9)
    assert len(basis) == 7


def test_atilde_basis_matches_oracle_everywhere():
    for n in (2, 3, 4):
        for degree in range(0, n * n + 1):
            assert anti.atilde_basis(n, degree) == oracle_atilde_basis(n, degree)


def test_x_powers_multiply():
    n = 3
    for a in range(2 * n):
        for b in range(2 * n):
            xa = anti.ExtElement.monomial(n, (), a, 0)
            xb = anti.ExtElement.monomial(n, (), b, 0)
            prod = anti.atilde_mul(xa, xb)
            if a + b < 2 * n and a + b <= n * n:
                assert prod == anti.ExtElement.monomial(n, (), a + b, 0)
            else:
                assert prod.is_zero()


def test_x_anticommutes_with_t():
    n = 3
    X = anti.ExtElement.monomial(n, (), 1, 0)
    T1 = anti.ExtElement.monomial(n, (1,), 0, 0)
    assert anti.atilde_mul(X, T1) == anti.atilde_mul(T1, X).scale(-1)


def test_xy_square():
    n = 2
    XY = anti.ExtElement.monomial(n, (), 1, 1)
    assert anti.atilde_mul(XY, XY) == anti.ExtElement.monomial(n, (), 2, 2, -1)


def test_products_match_sign_oracle():
    rng = random.Random(0)
    for n in (2, 3, 4):
        mons = []
        for d in range(0, n * n + 1):
            mons.extend(anti.atilde_basis(n, d))
        for _ in range(200):
            ma, mb = rng.choice(mons), rng.choice(mons)
            ea = anti.ExtElement.monomial(n, *ma)
            eb = anti.ExtElement.monomial(n, *mb)
            prod = anti.atilde_mul(ea, eb)
            expected = oracle_sign_and_normal_form(
                monomial_letters(ma) + monomial_letters(mb), n
            )
            if expected is None:
                assert prod.is_zero()
            else:
                sign, tset, i, j = expected
                assert prod == anti.ExtElement.monomial(n, tset, i, j, sign)


def test_grading():
    rng = random.Random(1)
    for n in (2, 3):
        mons = []
        for d in range(0, n * n + 1):
            mons.extend(anti.atilde_basis(n, d))
        for _ in range(100):
            ma, mb = rng.choice(mons), rng.choice(mons)
            prod = anti.atilde_mul(
                anti.ExtElement.monomial(n, *ma), anti.ExtElement.monomial(n, *mb)
            )
            if not prod.is_zero():
                assert prod.degree() == anti.ext_degree(ma) + anti.ext_degree(mb)


def test_sign_coherence_with_same_letter_correction():
    # Monomials obey a b = (-1)^(deg a deg b + i_a i_b + j_a j_b) b a: the
    # grading sign, corrected because powers of one odd letter accumulate
    # without sign (the algebra is not supercommutative).
    rng = random.Random(2)
    for n in (2, 3):
        mons = []
        for d in range(0, n * n + 1):
            mons.extend(anti.atilde_basis(n, d))
        for _ in range(150):
            ma, mb = rng.choice(mons), rng.choice(mons)
            ab = anti.atilde_mul(
                anti.ExtElement.monomial(n, *ma), anti.ExtElement.monomial(n, *mb)
            )
            ba = anti.atilde_mul(
                anti.ExtElement.monomial(n, *mb), anti.ExtElement.monomial(n, *ma)
            )
            exponent = (
                anti.ext_degree(ma) * anti.ext_degree(mb)
                + ma[1] * mb[1]
                + ma[2] * mb[2]
            )
            assert ab == ba.scale((-1) ** exponent)


def test_obar_small():
    assert anti.obar(2) == anti.ExtElement(
        2, {((), 3, 0): Fraction(2), ((), 0, 3): Fraction(-2)}
    )
    assert anti.obar(3) == anti.ExtElement(
        3,
        {
            ((), 5, 0): Fraction(3),
            ((), 0, 5): Fraction(-3),
            ((1,), 2, 0): Fraction(-1),
            ((1,), 0, 2): Fraction(1),
        },
    )


def test_obar_degree():
    for n in (2, 3, 4):
        assert anti.obar(n).degree() == 2 * n - 1


def test_rho_rules():
    assert anti.rho(2, ((), 2, 2)) == 2
    assert anti.rho(2, ((), 3, 1)) == 0
    assert anti.rho(2, ((), 1, 3)) == 0
    # missing two factors first occurs in top degree at n=5: T_3 alone has
    # degree 7, leaving 18 = 9+9 for the exponents
    assert anti.rho(5, ((3,), 9, 9)) == 0
    # full T product with even exponents in range
    n = 3
    assert anti.rho(n, ((1,), 2, 4)) == 3
    assert anti.rho(n, ((1,), 4, 2)) == 3
    assert anti.rho(n, ((1,), 3, 3)) == 0
    # missing exactly one factor at n=3: value (-1)^(h+n) = (-1)^4 = 1
    assert anti.rho(3, ((), 4, 5)) == 1


def test_rho_wrong_degree():
    with pytest.raises(WrongDegree):
        anti.rho(2, ((), 1, 1))


def test_alternative_rho_reading_breaks_containment():
    # Evidence for the implemented reading of the missing-one-factor rule:
    # if those monomials were sent to 0 instead of (-1)^(h+n), the image of
    # the multiplication map would no longer lie inside the kernel.
    n = 3
    basis = anti.atilde_basis(n, n * n)

    def rho_alt(m):
        tset, i, j = m
        missing = [h for h in range(1, n - 1) if h not in tset]
        if missing:
            return Fraction(0)
        if i % 2 == 0 and j % 2 == 0 and 2 <= i <= 2 * n - 2 and 2 <= j <= 2 * n - 2:
            return Fraction(n)
        return Fraction(0)

    m = anti.pi_map(n)
    alt = [rho_alt(b) for b in basis]
    composed = [
        sum(alt[r] * m[r, col] for r in range(m.rows)) for col in range(m.cols)
    ]
    assert any(composed), "alternative reading would also annihilate the image"


def test_pi_map_n2_products():
    X = anti.ExtElement.monomial(2, (), 1, 0)
    Y = anti.ExtElement.monomial(2, (), 0, 1)
    ob = anti.obar(2)
    assert anti.atilde_mul(X, ob) == anti.ExtElement.monomial(2, (), 1, 3, -2)
    assert anti.atilde_mul(Y, ob) == anti.ExtElement.monomial(2, (), 3, 1, -2)


def test_pi_map_n2_image():
    m = anti.pi_map(2)
    basis = anti.atilde_basis(2, 4)
    image = Subspace.from_vectors(len(basis), [m.column(c) for c in range(m.cols)])
    x3y = [Fraction(int(b == ((), 3, 1))) for b in basis]
    xy3 = [Fraction(int(b == ((), 1, 3))) for b in basis]
    x2y2 = [Fraction(int(b == ((), 2, 2))) for b in basis]
    assert image.dim() == 2
    assert image.contains_vector(x3y) and image.contains_vector(xy3)
    assert not image.contains_vector(x2y2)


def test_rho_pi_composition_is_zero():
    for n in (2, 3, 4):
        m = anti.pi_map(n)
        rv = anti.rho_vector(n)
        for col in range(m.cols):
            assert sum(rv[r] * m[r, col] for r in range(m.rows)) == 0


def test_pi_left_and_right_images_agree():
    for n in (2, 3, 4):
        right = anti.pi_map(n, "right")
        left = anti.pi_map(n, "left")
        sr = Subspace.from_vectors(right.rows, [right.column(c) for c in range(right.cols)])
        sl = Subspace.from_vectors(left.rows, [left.column(c) for c in range(left.cols)])
        assert sr == sl


def test_verify_kerim():
    expected_ambient = {2: 3, 3: 7, 4: 13}
    for n in (2, 3, 4):
        report = anti.verify_kerim(n)
        assert report["ambient_dim"] == expected_ambient[n]
        assert report["image_equals_kernel"]
        assert report["codimension"] == 1
        assert report["complement_spans"]
        assert report["rho_pi_zero"]


def test_verify_kerim_n2_ledger():
    report = anti.verify_kerim(2)
    assert report["ambient_dim"] == 3
    assert report["image_dim"] == 2
    assert report["complement_monomial"] == "X^2*Y^2"


def test_verify_kerim_budget():
    with pytest.raises(BudgetExceeded):
        anti.verify_kerim(5)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        anti.atilde_mul(
            anti.ExtElement.monomial(2, (), 1, 0), anti.ExtElement.monomial(3, (), 1, 0)
        )


# -- concrete wedge algebra ----------------------------------------------------


def test_fn_basis_dimensions():
    assert len(anti.fn_basis(2, 4)) == 7
    assert len(anti.fn_basis(3, 9)) == 163


def test_fn_basis_top_degree_blocks():
    # Degree n^2 splits as wedge-size blocks indexed by the X power 1..2n-1.
    for n in (2, 3):
        sizes = {}
        for subset, a in anti.fn_basis(n, n * n):
            sizes[a] = sizes.get(a, 0) + 1
        assert set(sizes) <= set(range(1, 2 * n))


def test_t_form_n2_single_coefficient():
    t1 = anti.t_form(2, 1)
    assert t1 == anti.WedgeForm(2, {((0, 1, 2), 0): Fraction(6)})


def test_t_form_coefficient_matches_permutation_sum():
    basis = anti.traceless_basis(2)
    total = Fraction(0)
    for perm in itertools.permutations(range(3)):
        prod = basis[perm[0]] * basis[perm[1]] * basis[perm[2]]
        sign = anti._perm_sign(perm)
        total += sign * prod.trace()
    assert total == 6


def test_on_in_fn_2():
    o2 = anti.on_in_fn(2)
    expected = anti.WedgeForm(
        2, {((), 3): Fraction(2), ((0, 1, 2), 0): Fraction(-6)}
    )
    assert o2 == expected


def test_fn_mul_sign_oracle():
    rng = random.Random(3)
    n = 2
    keys = []
    for d in range(0, 5):
        keys.extend(anti.fn_basis(n, d))
    for _ in range(200):
        (sa, xa), (sb, xb) = rng.choice(keys), rng.choice(keys)
        fa = anti.WedgeForm.monomial(n, sa, xa)
        fb = anti.WedgeForm.monomial(n, sb, xb)
        prod = anti.fn_mul(fa, fb)
        # Oracle: bubble-sort the letter word, one flip per distinct odd pair.
        letters = [("b", i) for i in sa] + ["X"] * xa + [("b", i) for i in sb] + ["X"] * xb
        sign = 1
        changed = True
        word = list(letters)

        def rank(letter):
            return (0, letter[1]) if letter != "X" else (1, 0)

        while changed:
            changed = False
            for pos in range(len(word) - 1):
                a, b = word[pos], word[pos + 1]
                if rank(a) > rank(b):
                    word[pos], word[pos + 1] = b, a
                    if a != b:
                        sign = -sign
                    changed = True
        subset = tuple(i for kind, i in [w for w in word if w != "X"])
        xexp = word.count("X")
        if len(set(subset)) != len(subset) or xexp >= 2 * n or len(subset) + xexp > n * n:
            assert prod.is_zero()
        else:
            assert prod == anti.WedgeForm.monomial(n, subset, xexp, sign)


def test_ideal_component_n2_degree4():
    J = anti.ideal_component(2, 4)
    assert J.dim() == 4
    basis = anti.fn_basis(2, 4)

    def vec(key):
        return [Fraction(int(b == key)) for b in basis]

    for i in range(3):
        assert J.contains_vector(vec(((i,), 3)))
    assert J.contains_vector(vec(((0, 1, 2), 1)))


def test_corollary2_n2():
    J = anti.ideal_component(2, 4)
    block = anti.wedge_component_subspace(2, 4, 2)
    assert len(anti.fn_basis(2, 4)) == 7
    assert J.dim() == 4
    assert block.dim() == 3
    assert J.intersect(block).dim() == 0


def test_corollary2_n3_stretch():
    J = anti.ideal_component(3, 9)
    block = anti.wedge_component_subspace(3, 9, 7)
    assert len(anti.fn_basis(3, 9)) == 163
    assert block.dim() == 8
    assert J.intersect(block).dim() == 0


# -- realization ----------------------------------------------------------------


def test_x_power_is_standard_polynomial():
    rng = random.Random(4)
    for n in (2, 3):
        for a in (1, 2, 3):
            f = anti.x_power_fn(n, a)
            args = [anti.random_matrix(n, rng, 5) for _ in range(a)]
            direct = anti.standard_value_raw(args, n)
            assert f.raw(tuple(args)) == direct


def test_standard_value_dp_matches_permutation_sum():
    rng = random.Random(5)
    for n in (2, 3):
        for a in (1, 2, 3, 4):
            mats = [anti.random_matrix(n, rng, 4) for _ in range(a)]
            total = anti.mat_zero(n)
            for perm in itertools.permutations(range(a)):
                prod = mats[perm[0]]
                for idx in perm[1:]:
                    prod = anti.mat_mul(prod, mats[idx])
                total = anti.mat_add(
                    total, anti.mat_scale(prod, anti._perm_sign(perm))
                )
            assert anti.standard_value_raw(mats, n) == total


def test_commutator_via_realization():
    rng = random.Random(6)
    f = anti.x_power_fn(2, 2)
    for _ in range(20):
        a = anti.random_matrix(2, rng)
        b = anti.random_matrix(2, rng)
        lhs = f.raw((a, b))
        rhs = anti.mat_add(anti.mat_mul(a, b), anti.mat_scale(anti.mat_mul(b, a), -1))
        assert lhs == rhs


def test_realized_functions_are_antisymmetric():
    rng = random.Random(7)
    for n in (2, 3):
        mons = anti.atilde_basis(n, 3)
        for m in mons:
            f = anti.realize(anti.ExtElement.monomial(n, *m), n)
            args = [anti.random_matrix(n, rng, 4) for _ in range(f.arity)]
            if f.arity < 2:
                continue
            swapped = list(args)
            swapped[0], swapped[1] = swapped[1], swapped[0]
            assert f.raw(tuple(swapped)) == anti.mat_scale(f.raw(tuple(args)), -1)


def test_realize_rank_certifies_n_2n():
    fns2 = [anti.realize_invariant_monomial(2, t, a) for t, a in anti.am_basis(2)]
    assert len(fns2) == 8
    assert anti.realize_rank(2, fns2, samples=12, seed=0) == 8
    fns3 = [anti.realize_invariant_monomial(3, t, a) for t, a in anti.am_basis(3)]
    assert len(fns3) == 24
    assert anti.realize_rank(3, fns3, samples=5, seed=0) == 24


def test_on_vanishes_on_traceless_tuples():
    rng = random.Random(8)
    for n, cases in ((2, 25), (3, 20)):
        f = anti.realize(anti.on_in_fn(n), n)
        for _ in range(cases):
            args = tuple(anti.random_traceless(n, rng) for _ in range(2 * n - 1))
            assert f.raw(args) == anti.mat_zero(n)


def test_amitsur_levitzki_realized():
    rng = random.Random(9)
    for n in (2, 3):
        f = anti.x_power_fn(n, 2 * n)
        for _ in range(20):
            args = tuple(anti.random_matrix(n, rng) for _ in range(2 * n))
            assert f.raw(args) == anti.mat_zero(n)


def test_functoriality_on_crossing_free_products():
    # realize is multiplicative whenever normal ordering does not move a
    # matrix-valued X block across a matrix-valued Y block (left factor has
    # no Y, or right factor has no X); the formal rule XY = -YX is pure
    # bookkeeping and does not hold for the realized functions.
    rng = random.Random(10)
    checked = 0
    for n in (2, 3):
        mons = []
        for d in range(0, 4):
            mons.extend(anti.atilde_basis(n, d))
        pairs = [
            (a, b)
            for a in mons
            for b in mons
            if a[2] * b[1] == 0 and 0 < anti.ext_degree(a) + anti.ext_degree(b) <= 6
        ]
        rng.shuffle(pairs)
        for ma, mb in pairs[:60]:
            ea = anti.ExtElement.monomial(n, *ma)
            eb = anti.ExtElement.monomial(n, *mb)
            prod = anti.atilde_mul(ea, eb)
            wedge = anti.wedge_fn(anti.realize(ea, n), anti.realize(eb, n))
            args = tuple(anti.random_matrix(n, rng, 4) for _ in range(wedge.arity))
            lhs = wedge.raw(args)
            rhs = (
                anti.realize(prod, n).raw(args)
                if not prod.is_zero()
                else anti.mat_zero(n)
            )
            assert lhs == rhs, (n, ma, mb)
            checked += 1
    assert checked >= 100


def test_conjugation_equivariance():
    rng = random.Random(11)
    checked = 0
    for n in (2, 3):
        mons = anti.atilde_basis(n, 2) + anti.atilde_basis(n, 3)
        while checked < (50 if n == 2 else 100):
            m = rng.choice(mons)
            f = anti.realize(anti.ExtElement.monomial(n, *m), n)
            g = QMatrix.random(n, n, rng, 4)
            try:
                conj = anti.conjugate_fn(f, g)
            except ValueError:
                continue
            args = [anti.random_matrix(n, rng, 4) for _ in range(f.arity)]
            assert conj(args) == f(args)
            checked += 1


def test_basic_formula_realized():
    rng = random.Random(12)
    for n in (2, 3):
        for j in range(1, 2 * n):
            lhs, rhs = anti.basic_formula_sides(n, j)
            assert lhs.arity == rhs.arity == j + 2 * n - 1
            for _ in range(4):
                args = tuple(
                    anti.random_traceless(n, rng, 4) for _ in range(lhs.arity)
                )
                assert lhs.raw(args) == rhs.raw(args), (n, j)


def test_f2_top_degree_all_quasi_identities():
    # Antisymmetric 4-linear functions of a 3-dimensional space vanish; the
    # check runs over every basis 4-tuple, which determines a multilinear map.
    basis = [m.data for m in anti.traceless_basis(2)]
    for key in anti.fn_basis(2, 4):
        f = anti.realize(key, 2)
        for tup in itertools.product(basis, repeat=4):
            assert f.raw(tup) == anti.mat_zero(2)


def test_wedge_of_realized_t_forms_matches_fn_mul():
    rng = random.Random(13)
    n = 3
    t1 = anti.t_form(n, 1)
    x2 = anti.WedgeForm.x_power(n, 2)
    prod = anti.fn_mul(x2, t1)
    f_prod = anti.realize(prod, n)
    f_wedge = anti.wedge_fn(anti.realize(x2, n), anti.realize(t1, n))
    for _ in range(3):
        args = tuple(anti.random_traceless(n, rng, 3) for _ in range(5))
        assert f_prod.raw(args) == f_wedge.raw(args)


def test_realize_rejects_wrong_arity():
    from quasident.errors import ArityMismatch

    f = anti.x_power_fn(2, 2)
    with pytest.raises(ArityMismatch):
        f.raw((anti.mat_identity(2),))
