from __future__ import annotations
import math
import numpy as np
from dataclasses import dataclass
from fractions import Fraction
from enum import StrEnum
from loguru import logger
from .rootsystem import RootSystem, HighestRootData, KillingData, unit_root
from .utils import (GossetUsageError, VerificationError, rational_matrix, rational_identity,
                    as_float, is_symmetric, relative_groups)

GOLDEN_RATIO = (1 + math.sqrt(5)) / 2
# equal radii must floor to the same integer despite rounding below it
FLOOR_SLACK = 1e-9

# det(xI - cA) for E8 splits into these two quartics (coefficients, highest degree first)
E8_QUARTIC_F1 = (1, -15, 75, -135, 45)
E8_QUARTIC_F2 = (1, -15, 60, -90, 45)

# the quoted 1000-normalized E8 list; the exact values are 209.06, 338.26,
# 415.82, 502.75, 618.03, 672.82, 813.47, so entries 3 and 6 are not floors
E8_RADII_TABLE = (209, 338, 416, 502, 618, 673, 813, 1000)

class DimensionMismatchError(GossetUsageError):
    """Inputs were built from root systems of different rank."""

class ConvergenceError(VerificationError):
    """The symmetric eigensolver hit its sweep cap."""

class CharPolyError(VerificationError):
    """No integral scale was found or the E8 factorization did not hold."""

class GoldenPairError(VerificationError):
    """The E8 radii could not be partitioned into golden-ratio pairs."""

class Relation(StrEnum):
    TIMES_R = '×R'
    TIMES_INV_R = '×1/R'

@dataclass(frozen=True, kw_only=True, eq=False)
class KostantOperator:
    """A = sum_{j=0}^{l} n_j w_j (x) w_j in the basis {w_1..w_l}, exact rationals."""
    matrix_m: np.ndarray
    weights: np.ndarray
    gram: KillingData
    coxeter_number: int

    @property
    def rank(self) -> int:
        return self.matrix_m.shape[0]

    @property
    def trace(self) -> Fraction:
        return sum(np.diagonal(self.matrix_m), Fraction(0))

@dataclass(frozen=True, kw_only=True)
class RadiiReport:
    a_eigenvalues: tuple[float, ...]
    eigenvalues: tuple[float, ...]
    radii: tuple[float, ...]
    normalized: tuple[float, ...]
    integer_parts: tuple[int, ...]
    multiplicity: tuple[tuple[float, int], ...]
    coxeter_number: int

@dataclass(frozen=True, kw_only=True)
class CharPolyReport:
    scale_c: Fraction
    coefficients: tuple[int, ...]
    factors: tuple[tuple[int, ...], ...] = ()

@dataclass(frozen=True, kw_only=True)
class GoldenPair:
    smaller: int
    larger: int
    ratio: float

    @property
    def residual(self) -> float:
        return abs(self.ratio - GOLDEN_RATIO)

@dataclass(frozen=True, kw_only=True)
class MassRelation:
    f1_index: int
    f2_index: int
    relation: Relation
    residual: float

def build_A(rs: RootSystem, hr: HighestRootData, kd: KillingData) -> KostantOperator:
    n = rs.rank
    if kd.gram.shape != (n, n) or len(hr.marks) != n:
        raise DimensionMismatchError(
            f'{rs.lie_type}: rank {n}, Gram {kd.gram.shape}, {len(hr.marks)} marks')

    # j = 0 contributes w_psi (x) w_psi since sum n_i w_i = w_psi
    terms = [(1, hr.marks)] + [(hr.marks[j], unit_root(n, j)) for j in range(n)]
    weights = rational_matrix([[0] * n for _ in range(n)])
    for n_j, v in terms:
        weights = weights + n_j * rational_matrix(np.outer(v, v))

    matrix_m = weights @ kd.gram
    if not is_symmetric(kd.gram @ matrix_m):
        raise VerificationError(f'{rs.lie_type}: K M is not symmetric')

    op = KostantOperator(matrix_m=matrix_m, weights=weights, gram=kd,
                         coxeter_number=hr.coxeter_number)
    logger.debug(f'{rs.lie_type}: built A with trace {op.trace}')
    return op

def jacobi_eigh(sym: np.ndarray, tol: float = 1e-13,
                max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """
    Cyclic Jacobi eigensolver for a small real symmetric matrix.

    Sweeps over all (p, q) pairs, rotating each off-diagonal entry to zero,
    until the off-diagonal Frobenius norm drops below tol times the full norm.
    Eigenvalues come back ascending with matching eigenvector columns.
    """
    a = np.array(sym, dtype=float)
    a = (a + a.T) / 2
    n = a.shape[0]
    v = np.eye(n)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    negligible = 1e-3 * tol * scale / n

    for sweep in range(max_sweeps):
        off = math.sqrt(2) * np.linalg.norm(np.triu(a, 1))
        if off <= tol * scale:
            logger.debug(f'Jacobi converged after {sweep} sweeps, off-diagonal {off:.2e}')
            order = np.argsort(np.diag(a))
            return np.diag(a)[order], v[:, order]

        for p in range(n - 1):
            for q in range(p + 1, n):
                # entries this small cannot move the off-diagonal norm past tol
                if abs(a[p, q]) <= negligible:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = 1.0 if theta == 0 else np.sign(theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
        a = (a + a.T) / 2

    raise ConvergenceError(f'Jacobi eigensolver did not converge in {max_sweeps} sweeps')

def a_spectrum(op: KostantOperator) -> np.ndarray:
    """Eigenvalues of A, ascending, via the K-orthonormal frame L^T N L."""
    chol = np.linalg.cholesky(as_float(op.gram.gram))
    values, _ = jacobi_eigh(chol.T @ as_float(op.weights) @ chol)
    return values

def radii_report(op: KostantOperator, h: int | None = None) -> RadiiReport:
    h = h or op.coxeter_number
    a_values = a_spectrum(op)
    if np.any(a_values <= 0):
        raise VerificationError(f'A has non-positive eigenvalues: {a_values}')

    eigenvalues = (2 / h) * a_values
    radii = np.sqrt(eigenvalues)
    normalized = 1000 * (radii / radii[-1])
    normalized[-1] = 1000.0
    groups = relative_groups(list(eigenvalues), 1e-9)
    return RadiiReport(
        a_eigenvalues=tuple(float(x) for x in a_values),
        eigenvalues=tuple(float(x) for x in eigenvalues),
        radii=tuple(float(x) for x in radii),
        normalized=tuple(float(x) for x in normalized),
        integer_parts=tuple(math.floor(x + FLOOR_SLACK) for x in normalized),
        multiplicity=tuple((float(eigenvalues[g[0]]), len(g)) for g in groups),
        coxeter_number=h,
    )

def faddeev_leverrier(mat: np.ndarray) -> list[Fraction]:
    """Coefficients of det(xI - mat), highest degree first, in exact arithmetic."""
    n = mat.shape[0]
    identity = rational_identity(n)
    mk = rational_matrix([[0] * n for _ in range(n)])
    coeffs = [Fraction(1)]
    for k in range(1, n + 1):
        mk = mat @ mk + coeffs[-1] * identity
        coeffs.append(-sum(np.diagonal(mat @ mk), Fraction(0)) / k)
    return coeffs

def poly_mul(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return tuple(out)

def poly_eval(coeffs, x):
    acc = 0 * x
    for c in coeffs:
        acc = acc * x + c
    return acc

def _scale_candidates(op: KostantOperator) -> list[Fraction]:
    scale = op.gram.scale
    first = Fraction(op.coxeter_number) / op.trace
    candidates = [first, scale / 2] + [k * scale for k in (1, 2, 3, 6)]
    return list(dict.fromkeys(candidates))

def is_e8(op: KostantOperator) -> bool:
    return op.rank == 8 and op.coxeter_number == 30

def char_poly(op: KostantOperator) -> CharPolyReport:
    """
    Exact characteristic polynomial of c A for the first candidate scale c giving
    integer coefficients. The first candidate normalizes trace(c A) = h, which is
    30 for E8; for E8 the F1 F2 split is then verified by exact multiplication.
    """
    for c in _scale_candidates(op):
        coeffs = faddeev_leverrier(c * op.matrix_m)
        if all(x.denominator == 1 for x in coeffs):
            break
        logger.debug(f'scale {c} gives non-integral coefficients')
    else:
        raise CharPolyError('No candidate scale gives an integral characteristic polynomial')

    coefficients = tuple(int(x) for x in coeffs)
    factors = ()
    if is_e8(op):
        if coefficients != poly_mul(E8_QUARTIC_F1, E8_QUARTIC_F2):
            raise CharPolyError(f'E8 polynomial {coefficients} is not F1*F2 at scale {c}')
        factors = (E8_QUARTIC_F1, E8_QUARTIC_F2)
    return CharPolyReport(scale_c=c, coefficients=coefficients, factors=factors)

def char_poly_residuals(cp: CharPolyReport, report: RadiiReport) -> list[float]:
    """|F(c lambda)| for each eigenvalue lambda of A, relative to the coefficient scale."""
    coeffs = np.array(cp.coefficients, dtype=float)
    out = []
    for lam in report.a_eigenvalues:
        x = float(cp.scale_c) * lam
        bound = np.sum(np.abs(coeffs)) * max(1.0, abs(x)) ** (len(coeffs) - 1)
        out.append(abs(np.polyval(coeffs, x)) / bound)
    return out

def exact_eigenvalue(cp: CharPolyReport, a_eigenvalue: float) -> Fraction | None:
    """The eigenvalue of A as a fraction when it is a rational root of the polynomial."""
    candidate = Fraction(float(cp.scale_c) * a_eigenvalue).limit_denominator(1000)
    if poly_eval(cp.coefficients, candidate) == 0:
        return candidate / cp.scale_c
    return None

def golden_pairs(report: RadiiReport, tol: float = 1e-9) -> list[GoldenPair]:
    if len(report.radii) != 8 or report.coxeter_number != 30:
        raise GossetUsageError('golden pairing is defined for E8 only')

    radii = report.radii
    used: set[int] = set()
    pairs = []
    for i in range(len(radii)):
        if i in used:
            continue
        for j in range(i + 1, len(radii)):
            if j in used:
                continue
            ratio = radii[j] / radii[i]
            if abs(ratio - GOLDEN_RATIO) <= tol * GOLDEN_RATIO:
                pairs.append(GoldenPair(smaller=i, larger=j, ratio=ratio))
                used |= {i, j}
                break
    if len(used) != len(radii):
        raise GoldenPairError(f'only paired radii {sorted(used)} at tolerance {tol}')
    return pairs

def table_labels(report: RadiiReport) -> tuple[int, ...]:
    """The E8 list entry for each radius; every entry must lie within 1 of the normalized radius."""
    if len(report.radii) != 8 or report.coxeter_number != 30:
        raise GossetUsageError('the labelled radii table is defined for E8 only')
    for value, label in zip(report.normalized, E8_RADII_TABLE):
        if abs(value - label) >= 1:
            raise VerificationError(f'normalized radius {value:.4f} is not within 1 of {label}')
    return E8_RADII_TABLE

def quartic_families(report: RadiiReport, cp: CharPolyReport) -> tuple[int, ...]:
    """1 or 2 per radius: which of F1, F2 has c*lambda as a root (smaller residual)."""
    if len(cp.factors) != 2:
        raise GossetUsageError('quartic families are defined for E8 only')
    f1, f2 = (np.array(f, dtype=float) for f in cp.factors)
    families = []
    for lam in report.a_eigenvalues:
        x = float(cp.scale_c) * lam
        families.append(1 if abs(np.polyval(f1, x)) < abs(np.polyval(f2, x)) else 2)
    if families.count(1) != 4:
        raise VerificationError(f'quartic families are unbalanced: {families}')
    return tuple(families)

def golden_relations(pairs: list[GoldenPair], families: tuple[int, ...]) -> list[MassRelation]:
    """Each pair read as (F1 radius) x R or x 1/R = (F2 radius)."""
    out = []
    for pair in pairs:
        if {families[pair.smaller], families[pair.larger]} != {1, 2}:
            raise GoldenPairError(f'pair {pair} does not join the two families')
        if families[pair.smaller] == 1:
            out.append(MassRelation(f1_index=pair.smaller, f2_index=pair.larger,
                                    relation=Relation.TIMES_R, residual=pair.residual))
        else:
            out.append(MassRelation(f1_index=pair.larger, f2_index=pair.smaller,
                                    relation=Relation.TIMES_INV_R, residual=pair.residual))
    return out
