import numpy as np
import pytest

from gpbg.core import CollisionMap, iter_maps
from gpbg.errors import MemoryGuardExceeded, TermCapExceeded
from gpbg.kernels import build_all_kernels
from gpbg.numerics.duhamel import (
    apply_B,
    contract_B,
    duhamel_prefactor,
    evaluate_J_factorized,
    evaluate_J_full,
    evaluate_J_total,
    evaluate_J_via_forest,
    factor_terms,
    factorized_density,
    propagate_density,
    relative_error,
    tensor_product,
)
from gpbg.numerics.grid import Grid, band_limited, propagate_values
from gpbg.trees import build_forest


@pytest.fixture
def phi():
    return band_limited(Grid(8), np.random.default_rng(11))


def test_contraction_of_factorized_state(phi):
    v = phi.values
    g2 = factorized_density(v, 2)
    cube = np.abs(v) ** 2 * v
    plus = contract_B(g2, 1, "+")
    minus = contract_B(g2, 1, "-")
    assert np.allclose(plus, np.outer(cube, v.conj()))
    assert np.allclose(minus, np.outer(v, cube.conj()))


def test_contracted_kernel_has_zero_trace(phi):
    g2 = factorized_density(phi.values, 2)
    assert abs(np.trace(apply_B(g2, 1))) <= 1e-14


def test_contraction_index_checks(phi):
    g2 = factorized_density(phi.values, 2)
    with pytest.raises(ValueError):
        contract_B(g2, 2, "+")
    with pytest.raises(ValueError):
        contract_B(g2, 1, "*")


def test_memory_guard():
    g = Grid(16)
    with pytest.raises(MemoryGuardExceeded):
        factorized_density(np.ones(16), 4)
    with pytest.raises(MemoryGuardExceeded):
        evaluate_J_full(CollisionMap(2, 3, (1, 1, 1)), np.zeros(4), band_limited(g, np.random.default_rng(0)))


def test_density_propagation_matches_factors(phi):
    g = phi.grid
    gamma = propagate_density(factorized_density(phi.values, 1), g, 0.4)
    u = propagate_values(phi.values, g, 0.4)
    assert np.allclose(gamma, np.outer(u, u.conj()), atol=1e-13)


def test_degenerate_depth(phi):
    m = CollisionMap(1, 1, (1,))
    same = evaluate_J_full(m, [0.3, 0.3], phi)
    assert np.allclose(same, apply_B(factorized_density(phi.values, 2), 1))


@pytest.mark.parametrize("bottom", ["fixed", "free"])
@pytest.mark.parametrize("k, n", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_factorized_matches_full_tensor(phi, k, n, bottom):
    rng = np.random.default_rng(k * 10 + n)
    for m in iter_maps(k, n):
        for _ in range(3):
            times = rng.uniform(0, 1, n + 1)
            full = evaluate_J_full(m, times, phi, bottom)
            fact = tensor_product(evaluate_J_via_forest(m, times, phi, bottom))
            assert relative_error(full, fact) <= 1e-10


def test_full_operator_is_sum_over_maps(phi):
    times = [0.9, 0.5, 0.2]
    total = evaluate_J_total(1, 2, times, phi)
    parts = sum(evaluate_J_full(m, times, phi) for m in iter_maps(1, 2))
    assert relative_error(total, parts) <= 1e-13


@pytest.mark.parametrize("mu", [(1,), (1, 1), (1, 2), (1, 2, 1)])
def test_conjugate_symmetry(phi, mu):
    # B turns hermitian kernels into anti-hermitian ones, so each
    # contraction flips the symmetry sign
    m = CollisionMap(1, len(mu), mu)
    t = np.full(m.n + 1, 0.25)
    (J,) = evaluate_J_via_forest(m, t, phi)
    assert np.allclose(J, (-1) ** m.n * J.conj().T, atol=1e-13)


def test_two_tree_example_factorizes():
    phi = band_limited(Grid(8), np.random.default_rng(3))
    m = CollisionMap(2, 4, (1, 2, 3, 3))
    forest = build_forest(m)
    times = np.array([1.0, 0.8, 0.55, 0.3, 0.1])
    j1, j2 = evaluate_J_factorized(forest, build_all_kernels(forest), times, phi)
    # J^1_2 only sees t_0, t_2 and the bottom time t_4
    moved = times.copy()
    moved[[1, 3]] = [0.95, 0.15]
    _, j2b = evaluate_J_factorized(forest, build_all_kernels(forest), moved, phi)
    assert np.allclose(j2, j2b, atol=1e-13)
    assert np.abs(j1).max() > 0


def test_term_cap():
    m = CollisionMap(1, 12, tuple(range(1, 13)))
    forest = build_forest(m)
    with pytest.raises(TermCapExceeded):
        factor_terms(build_all_kernels(forest), cap=2**11)


def test_prefactor():
    assert duhamel_prefactor(1, 2) == -1
    assert duhamel_prefactor(-1, 1) == 1j
