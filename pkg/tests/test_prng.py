from genjacobi.prng import LCG, derive_seed, monomials, random_poly, random_unipotent


def test_lcg_golden_values():
    rng = LCG(0)
    assert [rng.next_u32() for _ in range(3)] == [335903614, 436792849, 2599843874]


def test_derive_seed_golden_values():
    assert derive_seed(0, 0) == 11400714819323198485
    assert derive_seed(5, 2) == 15755400384260043844


def test_randint_range_and_reproducibility():
    a, b = LCG(42), LCG(42)
    xs = [a.randint(-3, 3) for _ in range(200)]
    assert xs == [b.randint(-3, 3) for _ in range(200)]
    assert set(xs) <= set(range(-3, 4))
    assert len(set(xs)) == 7


def test_monomial_order():
    assert monomials(2, 1) == [(0, 0), (0, 1), (1, 0)]
    assert len(monomials(3, 2)) == 10


def test_random_poly_degree_bound():
    p = random_poly(LCG(9), 2, 2, 3)
    assert p.degree() <= 2
    assert all(abs(c) <= 3 for _, c in p.terms())


def test_random_unipotent_shape():
    m = random_unipotent(LCG(1), 3, 2, 1, 2, lower=True)
    assert m.triangularity() is not None
    assert all(m[i, i] == 1 for i in range(3))
    assert m[0, 1].is_zero() and m[0, 2].is_zero()
