import numpy as np
import pytest

from genjacobi.jacobi_verify import (anticommutator_ring, antisymmetry_order_check,
                                     cross_product_ring, free_ring, matrix_ring,
                                     verify_identities_12_to_14, verify_identity15_formal,
                                     verify_pth_jacobi_matrix, verify_pth_jacobi_symbolic,
                                     verify_reduction15)


@pytest.mark.parametrize("p", [2, 3, 4, 5])
def test_symbolic_pth_identity(p):
    res = verify_pth_jacobi_symbolic(p)
    assert res.verified
    assert res.stats["residual_terms"] == 0


def test_matrix_identity_with_pinned_elements():
    mats = [np.eye(2, dtype=object), np.array([[0, 1], [0, 0]], dtype=object),
            np.array([[0, 0], [1, 0]], dtype=object)]
    assert verify_pth_jacobi_matrix(3, 2, 1, 0, elements=mats).verified


def test_matrix_identity_seeded():
    assert verify_pth_jacobi_matrix(4, 3, 5, seed=1).verified


@pytest.mark.parametrize("p", [2, 3, 4])
def test_formal_reversed_tail_cancellation(p):
    res = verify_identity15_formal(p)
    assert res.verified and res.stats["residual_terms"] == 0


@pytest.mark.parametrize("p", [2, 3, 4])
def test_reduction_to_cyclic_identities(p):
    res = verify_reduction15(p)
    assert res.verified, res.witness


@pytest.mark.parametrize("ring", [free_ring(), matrix_ring(3), cross_product_ring()])
def test_cyclic_identities_on_lie_rings(ring):
    assert all(r.verified for r in verify_identities_12_to_14(ring, 5, 3))


def test_anticommutator_fails_first_cyclic_identity():
    results = verify_identities_12_to_14(anticommutator_ring(2), 5, 3, upto=2)
    assert not results[0].verified
    assert "residual" in results[0].witness


@pytest.mark.parametrize("k", [2, 3, 4])
def test_antisymmetry_order(k):
    assert antisymmetry_order_check(matrix_ring(2), k, 5, 1).verified
    res = antisymmetry_order_check(anticommutator_ring(2), k, 5, 1)
    assert not res.verified
    assert res.witness["failed"] == "1.2"
    assert res.stats["characterizations_agree"]


def test_invalid_arguments():
    with pytest.raises(ValueError):
        verify_pth_jacobi_symbolic(1)
    with pytest.raises(ValueError):
        verify_reduction15(5)
