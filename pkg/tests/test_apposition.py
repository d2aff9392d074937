import itertools
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from lie import apposition, rootsystem
from lie.apposition import JacobiIdentityError, ZeroProjectionError
from lie.kostant import DimensionMismatchError
from lie.rootsystem import LieType

def test_a2_chevalley_constants():
    rs = rootsystem.build_root_system(LieType.parse('A2'))
    constants = apposition.chevalley_constants(rs)
    assert abs(constants[(1, 0), (0, 1)]) == 1
    assert constants[(0, 1), (1, 0)] == -constants[(1, 0), (0, 1)]
    assert constants[(-1, 0), (0, -1)] == -constants[(1, 0), (0, 1)]

def test_g2_has_constant_three():
    rs = rootsystem.build_root_system(LieType.parse('G2'))
    constants = apposition.chevalley_constants(rs)
    assert max(abs(c) for c in constants.values()) == 3
    assert set(map(abs, constants.values())) == {1, 2, 3}

@pytest.mark.parametrize('label', ['B3', 'C3', 'F4', 'G2', 'D4'])
def test_constant_magnitudes(label):
    rs = rootsystem.build_root_system(LieType.parse(label))
    for (a, b), c in apposition.chevalley_constants(rs).items():
        p, _ = rootsystem.root_string(rs, b, a)
        assert abs(c) == p + 1

def test_extraspecial_pairs_cover_non_simple_roots():
    rs = rootsystem.build_root_system(LieType.parse('F4'))
    pairs = apposition.extraspecial_pairs(rs)
    assert len(pairs) == len(rs.positive_roots) - rs.rank
    for xi, (gamma, delta) in pairs.items():
        assert rootsystem.add_roots(gamma, delta) == xi

def test_full_jacobi_a2(a2):
    sc = a2.structure
    assert apposition.check_jacobi(sc.chevalley, sc.dim, itertools.product(range(sc.dim), repeat=3)) == 512

def test_broken_sign_fails_jacobi(a2):
    sc = a2.structure
    table = dict(sc.chevalley)
    i, j = sc.root_index((1, 0)), sc.root_index((0, 1))
    for key in ((i, j), (j, i)):
        table[key] = {k: -c for k, c in table[key].items()}
    with pytest.raises(JacobiIdentityError):
        apposition.check_jacobi(table, sc.dim, itertools.product(range(sc.dim), repeat=3))

@pytest.mark.parametrize('label', ['A2', 'B3', 'G2', 'F4'])
def test_pairing_is_one(pipelines, label):
    assert all(p == 1 for p in pipelines(label).structure.pairing)

@pytest.mark.parametrize('label', ['A2', 'G2', 'B2'])
def test_killing_form_is_the_trace_form(pipelines, label):
    sc = pipelines(label).structure
    ads = [apposition.ad_matrix(sc, apposition.basis_vector(sc, i)) for i in range(sc.dim)]
    traces = np.array([[np.trace(u @ v) for v in ads] for u in ads])
    assert np.allclose(traces, sc.killing_gram, atol=1e-12)

@pytest.mark.parametrize('label', ['B3', 'G2', 'C3'])
@settings(max_examples=50, deadline=None)
@given(data=st.data())
def test_bracket_identities(pipelines, label, data):
    sc = pipelines(label).structure
    index = st.integers(0, sc.dim - 1)
    u, v, w = (apposition.basis_vector(sc, data.draw(index)) for _ in range(3))

    assert np.allclose(apposition.bracket(sc, u, v), -apposition.bracket(sc, v, u))
    jacobi = (apposition.bracket(sc, u, apposition.bracket(sc, v, w))
              + apposition.bracket(sc, v, apposition.bracket(sc, w, u))
              + apposition.bracket(sc, w, apposition.bracket(sc, u, v)))
    assert np.allclose(jacobi, 0, atol=1e-12)
    # invariance of the Killing form
    g = sc.killing_gram
    assert apposition.bracket(sc, u, v) @ g @ w == pytest.approx(-(v @ g @ apposition.bracket(sc, u, w)), abs=1e-12)
    # theta is an automorphism
    theta = sc.theta
    assert np.allclose(theta @ apposition.bracket(sc, u, v), apposition.bracket(sc, theta @ u, theta @ v))

def test_ad_matrix_shapes(a2):
    sc = a2.structure
    assert not np.any(apposition.ad_matrix(sc, np.zeros(sc.dim)))
    with pytest.raises(DimensionMismatchError):
        apposition.ad_matrix(sc, np.zeros(sc.dim + 1))

def test_cartan_acts_by_roots(g2):
    sc = g2.structure
    rs = sc.rs
    for k in range(sc.rank):
        ad_t = apposition.ad_matrix(sc, apposition.basis_vector(sc, sc.cartan_index(k)))
        expected = [float(sum(sc.killing.gram[k][m] * r[m] for m in range(sc.rank))) for r in rs.roots]
        assert np.allclose(np.diag(ad_t)[:sc.n_roots], expected)

def test_cyclic_element_a2(a2):
    ce = a2.cyclic
    assert np.count_nonzero(ce.x) == 3
    assert np.count_nonzero(ce.x_minus) == 3
    assert ce.beta == (1.0, 1.0, 1.0)
    assert np.count_nonzero(ce.x_plus) == 2

def test_cyclic_element_e8_coefficients(e8):
    ce = e8.cyclic
    assert sorted(ce.x[list(ce.simple_indices)]) == pytest.approx(
        sorted(np.sqrt([2, 3, 4, 6, 5, 4, 3, 2])))
    assert ce.x[ce.lowest_index] == 1.0
    assert ce.x_minus[ce.highest_index] == 1.0

@pytest.mark.parametrize('label', ['A2', 'B3', 'G2', 'F4', 'E6'])
def test_cyclic_element_invariants(pipelines, label):
    p = pipelines(label)
    assert apposition.commutator_defect(p.structure, p.cyclic) < 1e-12
    assert apposition.compact_defect(p.structure, p.cyclic) < 1e-10
    assert apposition.regularity(p.structure, p.cyclic).is_regular

def test_a2_spectrum(a2):
    sr = a2.spectral
    assert sr.kernel_dim == 2
    assert len(sr.nonzero_eigs) == 6
    assert np.abs(sr.nonzero_eigs) ** 2 == pytest.approx([0.5] * 6, rel=1e-12)
    assert [c.multiplicity for c in sr.modulus_classes] == [6]
    (radius,) = sr.oracle_radii
    assert radius.radius == pytest.approx(np.sqrt(1 / 3), rel=1e-12)
    assert radius.weight == 2
    assert apposition.rotation_defect(sr.nonzero_eigs, 3) < 1e-12

def test_a2_eigenvectors(a2):
    sc, ce, sr = a2.structure, a2.cyclic, a2.spectral
    for k, nu in enumerate(sr.nonzero_eigs):
        v = sr.eigenvectors[:, k]
        assert np.linalg.norm(apposition.bracket(sc, ce.x, v) - nu * v) < 1e-12 * np.linalg.norm(v)

@pytest.mark.parametrize('label', ['B3', 'C4', 'D5', 'G2', 'F4', 'E6'])
def test_oracle_matches_operator(pipelines, label):
    p = pipelines(label)
    assert max(r for _, _, r in p.oracle_comparison()) < 1e-8
    assert len(p.spectral.nonzero_eigs) == p.root_system.rank * p.h
    assert all(c.multiplicity % p.h == 0 for c in p.spectral.modulus_classes)

def test_modulus_spectrum(g2):
    direct = apposition.modulus_spectrum(g2.structure, g2.cyclic)
    joint = np.sort(np.abs(g2.spectral.nonzero_eigs) ** 2)
    assert direct == pytest.approx(joint, rel=1e-9)

def test_rotation_defect_detects_broken_symmetry():
    values = np.exp(2j * np.pi * np.arange(5) / 5)
    assert apposition.rotation_defect(values, 5) < 1e-12
    assert apposition.rotation_defect(values[:4], 5) > 0.5

@pytest.mark.parametrize('label', ['A2', 'G2', 'B3', 'F4'])
def test_z_vectors(pipelines, label):
    p = pipelines(label)
    sc, ce, sr = p.structure, p.cyclic, p.spectral
    for cls in sr.modulus_classes:
        k = cls.members[0]
        residual = apposition.zero_component_eigencheck(
            sc, ce, sr.eigenvectors[:, k], sr.nonzero_eigs[k], p.operator)
        assert residual < 1e-8
        doubled = apposition.zero_component_eigencheck(
            sc, ce, 2 * sr.eigenvectors[:, k], sr.nonzero_eigs[k], p.operator)
        assert doubled == pytest.approx(residual, abs=1e-14)
    assert apposition.z_rank(sc, sr) == sc.rank

@pytest.mark.parametrize('label', ['A2', 'G2', 'B3', 'D4', 'F4'])
def test_one_z_per_orbit_is_a_basis(pipelines, label):
    p = pipelines(label)
    sc, sr = p.structure, p.spectral
    picks = apposition.orbit_representatives(sr)
    assert len(picks) == sc.rank
    z = sr.eigenvectors[sc.cartan_slice][:, picks]
    assert np.linalg.matrix_rank(z, tol=1e-8) == sc.rank
    assert apposition.z_rank(sc, sr) == sc.rank

    # no two representatives lie in the same gamma-orbit
    gamma = np.exp(2j * np.pi / p.h)
    for a, b in itertools.combinations(picks, 2):
        nu_a, nu_b = sr.nonzero_eigs[a], sr.nonzero_eigs[b]
        rotated = nu_a * gamma ** np.arange(1, p.h)
        assert np.min(np.abs(rotated - nu_b)) > 1e-8 * abs(nu_a)


def test_zero_vector_has_no_cartan_part(a2):
    sc, ce, sr = a2.structure, a2.cyclic, a2.spectral
    with pytest.raises(ZeroProjectionError):
        apposition.zero_component_eigencheck(sc, ce, np.zeros(sc.dim), sr.nonzero_eigs[0], a2.operator)

def test_reconstruction_a2(a2):
    sc, ce, sr = a2.structure, a2.cyclic, a2.spectral
    h = a2.h
    for k in range(len(sr.nonzero_eigs)):
        z = sr.eigenvectors[sc.cartan_slice, k]
        gv = apposition.reconstruct_root_vector(sc, ce, z, sr.nonzero_eigs[k])
        assert gv.residual < 1e-9
        assert gv.purification == 0.0
        assert np.allclose(gv.components[0][sc.cartan_slice], z, rtol=0, atol=1e-15)
        assert all(-h < g < h for g in gv.support)
        for grade, comp in gv.components.items():
            assert not np.any(comp[sc.grades != grade])

        v = gv.assemble()
        assert np.linalg.norm(apposition.bracket(sc, ce.x, v) - gv.nu * v) < 1e-9 * np.linalg.norm(v)

def test_reconstruction_rejects_wrong_rank(a2):
    sc, ce, sr = a2.structure, a2.cyclic, a2.spectral
    with pytest.raises(DimensionMismatchError):
        apposition.reconstruct_root_vector(sc, ce, np.ones(3), sr.nonzero_eigs[0])

def test_reconstruction_reports_distance_to_the_eigenspace(g2):
    sc, ce, sr = g2.structure, g2.cyclic, g2.spectral
    first, second = (cls.members[0] for cls in sr.modulus_classes)
    z = sr.eigenvectors[sc.cartan_slice, first]
    gv = apposition.reconstruct_root_vector(sc, ce, z, sr.nonzero_eigs[first], op=g2.operator)
    assert gv.residual < 1e-9
    assert gv.purification < 1e-10

    # a Cartan vector mixing two classes is cleaned up, but not silently
    mixed = z + 0.3 * sr.eigenvectors[sc.cartan_slice, second]
    gv = apposition.reconstruct_root_vector(sc, ce, mixed, sr.nonzero_eigs[first], op=g2.operator)
    assert gv.residual < 1e-9
    assert gv.purification > 1e-3

def test_reconstruction_rejects_zero_vector(a2):
    sc, ce, sr = a2.structure, a2.cyclic, a2.spectral
    with pytest.raises(ZeroProjectionError):
        apposition.reconstruct_root_vector(sc, ce, np.zeros(sc.rank), sr.nonzero_eigs[0])


@pytest.mark.slow
def test_e8_spectrum(e8):
    sr = e8.spectral
    assert sr.kernel_dim == 8
    assert [c.multiplicity for c in sr.modulus_classes] == [30] * 8
    assert [r.weight for r in sr.oracle_radii] == [1] * 8
    assert apposition.rotation_defect(sr.nonzero_eigs, 30) < 1e-9
    assert max(r for _, _, r in e8.oracle_comparison()) < 1e-8
    assert apposition.z_rank(e8.structure, sr) == 8
    assert len(apposition.orbit_representatives(sr)) == 8

@pytest.mark.slow
def test_e8_reconstruction(e8):
    sc, ce, sr = e8.structure, e8.cyclic, e8.spectral
    for cls in (sr.modulus_classes[0], sr.modulus_classes[-1]):
        k = cls.members[0]
        gv = apposition.reconstruct_root_vector(sc, ce, sr.eigenvectors[sc.cartan_slice, k],
                                                sr.nonzero_eigs[k], op=e8.operator)
        assert gv.residual < 1e-9
        assert abs(gv.nu) == pytest.approx(abs(sr.nonzero_eigs[k]), rel=1e-9)
        assert min(gv.support) > -30 and max(gv.support) < 30
