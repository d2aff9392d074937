from __future__ import annotations
import math
import numpy as np
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence
from mpmath import mp
from loguru import logger

class GossetUsageError(ValueError):
    """Raised for inadmissible input: bad type labels, flags or exponents."""

class VerificationError(RuntimeError):
    """Raised when a numerical or structural check fails."""

@dataclass(frozen=True)
class Surd:
    """Exact number of the form coeff * sqrt(radicand), both rational."""
    coeff: Fraction
    radicand: Fraction = Fraction(1)

    def __mul__(self, other: Surd) -> Surd:
        return Surd(self.coeff * other.coeff, self.radicand * other.radicand)

    def __float__(self) -> float:
        return float(self.coeff) * math.sqrt(self.radicand)

    def to_mp(self):
        return mp_fraction(self.coeff) * mp.sqrt(mp_fraction(self.radicand))

def mp_fraction(value: Fraction | int):
    value = Fraction(value)
    return mp.mpf(value.numerator) / value.denominator

def exact(value) -> Fraction:
    """Fraction with Python int parts; numpy integer scalars overflow and do not hash."""
    if isinstance(value, np.integer):
        value = int(value)
    return Fraction(value)

def rational_matrix(rows: Iterable[Iterable]) -> np.ndarray:
    return np.array([[exact(v) for v in row] for row in rows], dtype=object)

def rational_identity(n: int) -> np.ndarray:
    return rational_matrix([[int(i == j) for j in range(n)] for i in range(n)])

def as_float(mat: np.ndarray) -> np.ndarray:
    return np.array(mat, dtype=float)

def mp_matrix(mat: np.ndarray):
    return mp.matrix([[mp_fraction(v) for v in row] for row in mat])

def is_symmetric(mat: np.ndarray) -> bool:
    return bool((mat == mat.T).all())

def clusters(sorted_values: Sequence[float], tol: float) -> list[list[int]]:
    """Split ascending values into runs whose neighbours differ by at most tol."""
    groups: list[list[int]] = []
    for k, value in enumerate(sorted_values):
        if groups and value - sorted_values[groups[-1][-1]] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups

def relative_groups(values: Sequence[float], rel_tol: float) -> list[list[int]]:
    """Group positive values whose relative difference to the group head is below rel_tol.

    Returns index lists into `values`, ordered by ascending value.
    """
    order = sorted(range(len(values)), key=lambda k: values[k])
    groups: list[list[int]] = []
    for k in order:
        if groups:
            head = values[groups[-1][0]]
            if abs(values[k] - head) <= rel_tol * max(abs(head), abs(values[k])):
                groups[-1].append(k)
                continue
        groups.append([k])
    return groups

def normal_eigensystem(mat: np.ndarray, gap: float = 1e-7) -> tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decomposition of a real normal matrix without a nonsymmetric solver.

    The symmetric part H and the skew part S of a normal matrix commute, so H is
    diagonalized first and -iS (Hermitian) is diagonalized inside each cluster of
    H-eigenvalues. Sub-clusters that are still degenerate in -iS are re-split by H.

    Args:
        mat: real square matrix with mat @ mat.T == mat.T @ mat
        gap: relative cluster gap, scaled by the Frobenius norm of mat

    Returns:
        (values, vectors): complex eigenvalues and orthonormal complex
        eigenvectors (columns) in the coordinates of `mat`
    """
    n = mat.shape[0]
    sym = (mat + mat.T) / 2
    skew_h = -0.5j * (mat - mat.T)
    tol = gap * max(np.linalg.norm(mat), np.finfo(float).tiny)

    a, basis = np.linalg.eigh(sym)
    vectors = np.zeros((n, n), dtype=complex)
    for block in clusters(a, tol):
        vc = basis[:, block].astype(complex)
        if len(block) > 1:
            b, rot = np.linalg.eigh(vc.conj().T @ skew_h @ vc)
            vc = vc @ rot
            for sub in clusters(b, tol):
                if len(sub) > 1:
                    us = vc[:, sub]
                    _, rot = np.linalg.eigh(us.conj().T @ sym @ us)
                    vc[:, sub] = us @ rot
        vectors[:, block] = vc

    re = np.real(np.einsum('ij,ik,kj->j', vectors.conj(), sym, vectors))
    im = np.real(np.einsum('ij,ik,kj->j', vectors.conj(), skew_h, vectors))
    logger.debug(f'normal eigensystem: n={n}, cluster tolerance {tol:.3e}')
    return re + 1j * im, vectors
