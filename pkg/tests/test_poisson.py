import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geps.algebra import StructureAlgebra, se2_algebra
from geps.extension import C_CROSS
from geps.models import (CirculationParams, InertiaTensor, SleighParams, fbar_function, fbar_leaf_kind,
                         hamiltonian_function, kirchhoff_rhs, sleigh_reduced_rhs, reduced_energy)
from geps.poisson import (EXTENDED, SE2, AffineMap, PoissonStructure, TestFunction, antisymmetry_defect,
                          as_structure, casimir_check, ham_vf, jacobi_residual, lp_extended, lp_general,
                          lp_magnetic, lp_se2, magnetic_structure, poisson_map_residual, reduced_sleigh,
                          reduced_sleigh_structure)
from geps.verify import CORRUPTED, heisenberg_cocycle, heisenberg_structure, random_sleigh

unit = st.floats(-1, 1, allow_nan=False)


def test_lp_se2_examples():
    assert np.allclose(lp_se2((0, 0, 0)), 0)
    assert np.allclose(lp_se2((7, 1, 2)), [[0, -2, 1], [2, 0, 0], [-1, 0, 0]])


def test_lp_magnetic_examples(rng):
    mu = rng.uniform(-1, 1, 3)
    assert np.allclose(lp_magnetic(mu, CirculationParams()), lp_se2(mu))
    assert np.allclose(lp_magnetic((0, 0, 0), CirculationParams(kappa=1.0)), [[0, 0, 0], [0, 0, -1], [0, 1, 0]])
    # entry form with alpha, beta
    c = CirculationParams(rho=2.0, kappa=0.3, alpha=-0.7, beta=0.4)
    k, p1, p2 = mu
    ra, rb, rk = c.rho * c.alpha, c.rho * c.beta, c.rho * c.kappa
    want = [[0, -p2 - ra, p1 - rb], [p2 + ra, 0, -rk], [-p1 + rb, rk, 0]]
    assert np.allclose(lp_magnetic(mu, c), want)


def test_lp_extended_blocks(rng):
    z = rng.uniform(-1, 1, 6)
    P = lp_extended(z)
    _, p1, p2, s0, s1, s2 = z
    assert np.allclose(P[:3, :3], [[0, -p2 - s2, p1 + s1], [p2 + s2, 0, -s0], [-p1 - s1, s0, 0]])
    assert np.all(P[3:, :] == 0) and np.all(P[:, 3:] == 0)
    z[3:] = 0
    assert np.allclose(lp_extended(z)[:3, :3], lp_se2(z[:3]))


def test_lp_general_cases(rng):
    P = lp_general(se2_algebra(), C_CROSS, sign=-1)
    for z in rng.uniform(-1, 1, (100, 6)):
        assert np.array_equal(P.matrix(z), lp_extended(z))
    P0 = lp_general(se2_algebra())
    mu = rng.uniform(-1, 1, 3)
    assert P0.dim == 3 and np.allclose(P0.matrix(mu), lp_se2(mu))
    z = np.array([0.3, -0.1, 1.5])
    minus = lp_general(StructureAlgebra.abelian(2), heisenberg_cocycle(2.0), sign=-1).matrix(z)
    assert np.allclose(minus[:2, :2], [[0, -3.0], [3.0, 0]])
    # the Lorentz-force structure is the plus bracket
    assert np.allclose(heisenberg_structure(2.0).matrix(z), -minus)
    with pytest.raises(ValueError):
        lp_general(se2_algebra(), C_CROSS, fiber_dim=2)
    with pytest.raises(ValueError):
        lp_general(se2_algebra(), sign=0)


def test_reduced_sleigh_structure():
    p = SleighParams(InertiaTensor(1, 0, 0, 1, 0, 1), CirculationParams(alpha=1.0))
    assert np.allclose(reduced_sleigh_structure((0.4, -2.0), p), [[0, -1], [1, 0]])
    q = SleighParams(InertiaTensor(2, 0.5, 0.2, 1, 0.3, 2), CirculationParams(alpha=1.0))
    # a point of the line L1 w + Z v1 + rho alpha = 0 gives a zero-dimensional leaf
    assert np.allclose(reduced_sleigh_structure((-2.0, 0.0), q), 0)


def test_reduced_sleigh_structure_rejects_bad_D():
    class Fake:
        class inertia:
            D, L1, Z = 0.0, 0.0, 0.0
        circ = CirculationParams()
    with pytest.raises(ValueError):
        reduced_sleigh_structure((0.0, 0.0), Fake)


def test_reduced_bracket_generates_reduced_flow(rng):
    for _ in range(200):
        sp = random_sleigh(rng)
        x = rng.uniform(-1, 1, 2)
        I = sp.inertia
        H = TestFunction(0.0, np.zeros(2), [[I.J, -I.L2], [-I.L2, I.M]])
        assert H(x) == pytest.approx(reduced_energy(x, sp))
        assert np.max(np.abs(ham_vf(reduced_sleigh(sp), H, x) - sleigh_reduced_rhs(x, sp))) <= 1e-12


def test_ham_vf_examples(rng):
    H = TestFunction(0.0, np.zeros(3), np.eye(3))
    assert np.allclose(ham_vf(SE2, H, (1, 1, 0)), (0, 0, -1))
    const = TestFunction(3.0, np.zeros(6))
    assert np.allclose(ham_vf(EXTENDED, const, rng.uniform(-1, 1, 6)), 0)
    out = ham_vf(EXTENDED, TestFunction.random(6, rng), rng.uniform(-1, 1, 6))
    assert np.all(out[3:] == 0)
    with pytest.raises(ValueError):
        ham_vf(SE2, const, np.zeros(3))


def test_kirchhoff_is_hamiltonian(rng):
    from geps.verify import random_inertia
    for _ in range(1000):
        I = random_inertia(rng)
        mu = rng.uniform(-1, 1, 3)
        assert np.max(np.abs(ham_vf(SE2, hamiltonian_function(I), mu) - kirchhoff_rhs(mu, I))) <= 1e-12


def test_antisymmetry(rng):
    sp = random_sleigh(rng)
    structures = [(SE2, 3), (EXTENDED, 6), (magnetic_structure(sp.circ), 3), (reduced_sleigh(sp), 2),
                  (lp_general(se2_algebra(), C_CROSS), 6)]
    for P, n in structures:
        for x in rng.uniform(-1, 1, (1000, n)):
            assert antisymmetry_defect(P, x) == 0


@pytest.mark.parametrize("which", ["se2", "magnetic", "extended", "general", "sleigh"])
def test_jacobi(rng, which):
    for _ in range(100):
        if which == "se2":
            P, n = SE2, 3
        elif which == "magnetic":
            P, n = magnetic_structure(CirculationParams(1.0, *rng.uniform(-1, 1, 3))), 3
        elif which == "extended":
            P, n = EXTENDED, 6
        elif which == "general":
            P, n = lp_general(se2_algebra(), C_CROSS, sign=+1), 6
        else:
            P, n = reduced_sleigh(random_sleigh(rng)), 2
        F, G, K = (TestFunction.random(n, rng) for _ in range(3))
        assert jacobi_residual(P, rng.uniform(-1, 1, n), F, G, K) <= 1e-8


def test_jacobi_constant_structure(rng):
    S = rng.uniform(-1, 1, (4, 4))
    P = as_structure(lambda x: S - S.T, 4)
    F, G, K = (TestFunction.random(4, rng) for _ in range(3))
    assert jacobi_residual(P, rng.uniform(-1, 1, 4), F, G, K) <= 1e-8


def test_jacobi_flags_corrupted_structure():
    rng = np.random.default_rng(7)
    F, G, K = (TestFunction.random(6, rng) for _ in range(3))
    assert jacobi_residual(CORRUPTED, rng.uniform(-1, 1, 6), F, G, K) > 1e-3


def test_jacobi_flags_non_lie_structure_constants():
    # a bracket built from constants violating Jacobi defines no Poisson structure
    c = np.zeros((3, 3, 3))
    for k, i, j in ((1, 0, 1), (2, 1, 2)):
        c[k, i, j], c[k, j, i] = 1.0, -1.0
    P = PoissonStructure(3, lambda mu: np.einsum("k,kij->ij", mu, c))
    rng = np.random.default_rng(1)
    worst = max(jacobi_residual(P, rng.uniform(-1, 1, 3), *(TestFunction.random(3, rng) for _ in range(3)))
                for _ in range(10))
    assert worst > 1e-3
    with pytest.raises(ValueError):
        StructureAlgebra(c)


def test_casimirs(rng):
    pts6 = rng.uniform(-1, 1, (1000, 6))
    assert casimir_check(EXTENDED, fbar_function(), pts6) <= 1e-12
    for i in range(3, 6):
        assert casimir_check(EXTENDED, TestFunction.coordinate(i, 6), pts6) == 0
    se2_cas = TestFunction(0.0, np.zeros(3), np.diag([0.0, 2.0, 2.0]))
    assert casimir_check(SE2, se2_cas, rng.uniform(-1, 1, (1000, 3))) <= 1e-12
    assert casimir_check(SE2, TestFunction.coordinate(0, 3), [(0.0, 0.5, 0.2)]) > 0


def test_fbar_leaf_geometry():
    assert fbar_leaf_kind((0.5, 0.1, -0.2)) == "paraboloid"
    assert fbar_leaf_kind((0.0, 0.1, -0.2)) == "cylinder"


def test_poisson_map_residuals(rng):
    ident = AffineMap.identity(6)
    F, K = TestFunction.random(6, rng), TestFunction.random(6, rng)
    assert poisson_map_residual(ident, EXTENDED, EXTENDED, F, K, rng.uniform(-1, 1, 6)) == 0
    for _ in range(1000):
        circ = CirculationParams(1.0, *rng.uniform(-1, 1, 3))
        iota = AffineMap(np.vstack([np.eye(3), np.zeros((3, 3))]), np.r_[np.zeros(3), circ.sigma])
        F, K = TestFunction.random(6, rng), TestFunction.random(6, rng)
        mu = rng.uniform(-1, 1, 3)
        assert poisson_map_residual(iota, magnetic_structure(circ), EXTENDED, F, K, mu) <= 1e-12
        assert np.allclose(EXTENDED.matrix(iota(mu))[:3, :3], lp_magnetic(mu, circ), atol=0)


def test_affine_pull_back(rng):
    A, b = rng.uniform(-1, 1, (6, 3)), rng.uniform(-1, 1, 6)
    phi = AffineMap(A, b)
    F = TestFunction.random(6, rng)
    for x in rng.uniform(-1, 1, (10, 3)):
        assert phi.pull_back(F)(x) == pytest.approx(F(phi(x)))


@settings(max_examples=50, deadline=None)
@given(st.lists(unit, min_size=4, max_size=4))
def test_test_function_gradient_matches_fd(x):
    rng = np.random.default_rng(3)
    F = TestFunction.random(4, rng)
    x = np.array(x)
    h = 1e-6
    fd = np.array([(F(x + h * e) - F(x - h * e)) / (2 * h) for e in np.eye(4)])
    assert np.allclose(F.gradient(x), fd, atol=1e-8)


def test_structure_point_shape_checked():
    with pytest.raises(ValueError):
        SE2.matrix(np.zeros(4))
