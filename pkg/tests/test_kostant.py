import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp
from conftest import E8_INTEGER_PARTS, E8_NORMALIZED, E8_TABLE, E8_F1, E8_F2
from lie import rootsystem, kostant
from lie.kostant import Relation, ConvergenceError, DimensionMismatchError, GOLDEN_RATIO
from lie.rootsystem import LieType
from lie.utils import GossetUsageError, rational_matrix
from models import SWEEP

def operator_for(label: str) -> kostant.KostantOperator:
    rs = rootsystem.build_root_system(LieType.parse(label))
    return kostant.build_A(rs, rootsystem.highest_root(rs), rootsystem.killing_gram(rs))

def test_a2_is_half_identity():
    op = operator_for('A2')
    assert op.matrix_m.tolist() == [[Fraction(1, 2), 0], [0, Fraction(1, 2)]]
    report = kostant.radii_report(op)
    assert report.eigenvalues == pytest.approx([1 / 3, 1 / 3], rel=1e-12)
    assert report.integer_parts == (1000, 1000)
    assert report.multiplicity == ((pytest.approx(1 / 3), 2),)

def test_a2_char_poly_and_exact_eigenvalue():
    op = operator_for('A2')
    cp = kostant.char_poly(op)
    assert cp.scale_c == 6
    assert cp.coefficients == (1, -6, 9)
    assert cp.factors == ()
    assert kostant.exact_eigenvalue(cp, 0.5) == Fraction(1, 2)

def test_e8_radii(e8):
    assert e8.radii.normalized == pytest.approx(E8_NORMALIZED, abs=5e-3)
    assert e8.radii.integer_parts == E8_INTEGER_PARTS
    assert e8.radii.coxeter_number == 30
    assert e8.operator.trace == 1
    assert all(count == 1 for _, count in e8.radii.multiplicity)

def test_e8_quoted_table(e8):
    assert kostant.table_labels(e8.radii) == E8_TABLE
    assert e8.labels == E8_TABLE
    assert max(abs(v - t) for v, t in zip(e8.radii.normalized, E8_TABLE)) < 1

def test_quoted_table_needs_e8(a2):
    with pytest.raises(GossetUsageError):
        kostant.table_labels(a2.radii)
    assert a2.labels == (1000, 1000)

def test_e8_eigenvalues_are_irrational(e8):
    assert all(kostant.exact_eigenvalue(e8.charpoly, lam) is None
               for lam in e8.radii.a_eigenvalues)

def test_e8_char_poly(e8):
    cp = e8.charpoly
    assert cp.scale_c == 30
    assert cp.coefficients == kostant.poly_mul(E8_F1, E8_F2)
    assert cp.coefficients[1] == -30
    assert cp.factors == (E8_F1, E8_F2)
    assert max(kostant.char_poly_residuals(cp, e8.radii)) < 1e-12

def test_e8_quartic_families(e8):
    # F1 holds the radii labelled 209, 618, 673 and 813
    assert e8.families == (1, 2, 2, 2, 1, 1, 1, 2)

def test_e8_golden_pairs(e8):
    pairs = kostant.golden_pairs(e8.radii)
    assert [(p.smaller, p.larger) for p in pairs] == [(0, 1), (2, 5), (3, 6), (4, 7)]
    assert all(p.residual < 1e-9 for p in pairs)

    relations = kostant.golden_relations(pairs, e8.families)
    assert [(r.f1_index, r.f2_index, r.relation) for r in relations] == [
        (0, 1, Relation.TIMES_R),
        (5, 2, Relation.TIMES_INV_R),
        (6, 3, Relation.TIMES_INV_R),
        (4, 7, Relation.TIMES_R),
    ]

def test_rounded_radii_are_not_golden():
    # the pairing only holds for the unrounded radii
    assert abs(338 / 209 - GOLDEN_RATIO) > 1e-6

def test_golden_pairs_need_e8(a2):
    with pytest.raises(GossetUsageError):
        kostant.golden_pairs(a2.radii)

def test_quartic_families_need_e8(a2):
    with pytest.raises(GossetUsageError):
        kostant.quartic_families(a2.radii, a2.charpoly)

@pytest.mark.parametrize('label', SWEEP)
def test_sweep_operator(label):
    op = operator_for(label)
    report = kostant.radii_report(op)
    h = op.coxeter_number
    assert len(report.eigenvalues) == op.rank
    assert all(x > 0 for x in report.eigenvalues)
    assert sum(report.eigenvalues) == pytest.approx(2 / h * float(op.trace), rel=1e-12)
    assert report.normalized[-1] == 1000.0
    assert report.integer_parts[-1] == 1000
    # equal radii share their integer part
    for group in _groups(report):
        assert len({report.integer_parts[i] for i in group}) == 1

    cp = kostant.char_poly(op)
    assert cp.coefficients[0] == 1
    assert cp.coefficients[-1] != 0
    assert max(kostant.char_poly_residuals(cp, report)) < 1e-10

@settings(max_examples=10, deadline=None)
@given(order=st.permutations(range(8)))
def test_e8_radii_do_not_depend_on_numbering(order):
    rs = rootsystem.permute_simple_roots(
        rootsystem.build_root_system(LieType.parse('E8')), list(order))
    op = kostant.build_A(rs, rootsystem.highest_root(rs), rootsystem.killing_gram(rs))
    report = kostant.radii_report(op)
    assert report.integer_parts == E8_INTEGER_PARTS
    assert kostant.char_poly(op).coefficients == kostant.poly_mul(E8_F1, E8_F2)

def test_mismatched_ranks():
    a2 = rootsystem.build_root_system(LieType.parse('A2'))
    a3 = rootsystem.build_root_system(LieType.parse('A3'))
    with pytest.raises(DimensionMismatchError):
        kostant.build_A(a2, rootsystem.highest_root(a3), rootsystem.killing_gram(a2))

@settings(max_examples=30, deadline=None)
@given(hnp.arrays(np.float64, (5, 5), elements=st.floats(-10, 10, allow_nan=False)))
def test_jacobi_matches_lapack(raw):
    sym = raw + raw.T
    values, vectors = kostant.jacobi_eigh(sym)
    scale = max(np.linalg.norm(sym), 1.0)
    assert np.allclose(values, np.linalg.eigvalsh(sym), atol=1e-10 * scale)
    assert np.allclose(sym @ vectors, vectors * values, atol=1e-9 * scale)
    assert np.allclose(vectors.T @ vectors, np.eye(5), atol=1e-10)

def test_jacobi_sweep_cap():
    with pytest.raises(ConvergenceError):
        kostant.jacobi_eigh(np.array([[2.0, 1.0], [1.0, 2.0]]), max_sweeps=0)

def test_faddeev_leverrier():
    mat = rational_matrix([[2, 1], [1, 2]])
    assert kostant.faddeev_leverrier(mat) == [1, -4, 3]

def test_poly_helpers():
    assert kostant.poly_mul((1, -1), (1, 1)) == (1, 0, -1)
    assert kostant.poly_eval((1, 0, -1), Fraction(1)) == 0
    assert kostant.poly_eval(E8_F1, 0) == 45

def _groups(report: kostant.RadiiReport) -> list[list[int]]:
    out: list[list[int]] = []
    for i, value in enumerate(report.eigenvalues):
        if out and value - report.eigenvalues[out[-1][-1]] <= 1e-9 * value:
            out[-1].append(i)
        else:
            out.append([i])
    return out

@pytest.mark.parametrize('label', ['A2', 'A4', 'A6', 'B2', 'B4', 'B5', 'C2', 'D4'])
def test_largest_radius_normalizes_to_exactly_1000(label):
    report = kostant.radii_report(operator_for(label))
    assert report.normalized[-1] == 1000.0
    assert report.integer_parts[-1] == 1000
    if label == 'A2':
        assert report.normalized == pytest.approx((1000.0, 1000.0), abs=1e-9)
        assert report.integer_parts == (1000, 1000)

@pytest.mark.parametrize('label', ['C4', 'C8', 'B8', 'F4'])
def test_jacobi_converges_on_the_cholesky_frame(label):
    op = operator_for(label)
    chol = np.linalg.cholesky(np.array(op.gram.gram, dtype=float))
    frame = chol.T @ np.array(op.weights, dtype=float) @ chol
    values, _ = kostant.jacobi_eigh(frame)
    assert values == pytest.approx(np.linalg.eigvalsh((frame + frame.T) / 2), rel=1e-12)
    assert kostant.radii_report(op).integer_parts[-1] == 1000

def test_jacobi_ignores_rounding_asymmetry():
    sym = np.array([[2.0, 1.0, 0.5], [1.0, 3.0, 0.25], [0.5, 0.25, 4.0]])
    skewed = sym.copy()
    skewed[0, 1] += 1.7e-17
    skewed[2, 1] -= 3e-17
    values, _ = kostant.jacobi_eigh(skewed)
    assert values == pytest.approx(np.linalg.eigvalsh(sym), rel=1e-13)

@pytest.mark.parametrize('label', ['A2', 'G2', 'E8'])
def test_exact_entries_are_python_integers(label):
    op = operator_for(label)
    entries = [*op.weights.flat, *op.matrix_m.flat, op.trace]
    assert all(type(x.numerator) is int and type(x.denominator) is int for x in entries)
    scale = Fraction(op.coxeter_number) / op.trace
    assert hash(scale) == hash(Fraction(scale.numerator, scale.denominator))

def test_rational_matrix_unwraps_numpy_integers():
    mat = rational_matrix(np.outer(np.array([2, 3]), np.array([2, 3])))
    assert all(type(x.numerator) is int for x in mat.flat)
    assert mat[1, 1] == 9
