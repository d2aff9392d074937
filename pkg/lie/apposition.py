"""
The adjoint representation by structure constants, the cyclic element x and
the spectral oracle for the circle radii.

Basis order is the root order of the RootSystem (e_phi, sorted by height)
followed by the Cartan elements t_1..t_l, where t_i is the Killing dual of
alpha_i. Root vectors are normalized so that kappa(e_phi, e_-phi) = 1 and the
Chevalley involution theta(e_phi) = -e_-phi, theta(t) = -t is preserved.
"""
from __future__ import annotations
import math
import threading
import numpy as np
from dataclasses import dataclass
from fractions import Fraction
from functools import cache, cached_property
from mpmath import mp
from loguru import logger
from .rootsystem import (RootSystem, HighestRootData, KillingData, Root,
                         add_roots, negate, height, heights, root_string, unit_root)
from .kostant import KostantOperator, DimensionMismatchError
from .utils import (VerificationError, Surd, mp_matrix, normal_eigensystem, relative_groups)

# mpmath precision is global state, shared by all threads
_MP_LOCK = threading.Lock()

class StructureConstantError(VerificationError):
    pass

class JacobiIdentityError(VerificationError):
    pass

class SpectrumError(VerificationError):
    pass

class ZeroProjectionError(VerificationError):
    """The Cartan component of an eigenvector vanished."""

class ReconstructionError(VerificationError):
    pass

def _sub(a: Root, b: Root) -> Root:
    return tuple(x - y for x, y in zip(a, b))

def extraspecial_pairs(rs: RootSystem) -> dict[Root, tuple[Root, Root]]:
    """For each non-simple positive xi, the pair (gamma, delta) with gamma minimal in root order."""
    pairs = {}
    for xi in rs.positive_roots:
        for gamma in rs.positive_roots:
            delta = _sub(xi, gamma)
            if height(delta) > 0 and rs.is_root(delta):
                pairs[xi] = (gamma, delta)
                break
    return pairs

def chevalley_constants(rs: RootSystem) -> dict[tuple[Root, Root], int]:
    """
    Integral N_{a,b} with [e_a, e_b] = N_{a,b} e_{a+b} for a Chevalley basis.

    Signs are fixed by N_{gamma,delta} = +(p+1) on every extraspecial pair; all
    other constants follow from the triple and quadruple relations between
    structure constants, with N_{-a,-b} = -N_{a,b}.
    """
    extraspecial = extraspecial_pairs(rs)

    @cache
    def n(a: Root, b: Root) -> Fraction:
        xi = add_roots(a, b)
        if not rs.is_root(xi):
            return Fraction(0)
        ha, hb = height(a), height(b)
        if ha < 0 and hb < 0:
            return -n(negate(a), negate(b))
        if ha < 0:
            return -n(b, a)
        if hb < 0:
            g = negate(xi)
            if height(xi) > 0:
                return rs.norm(g) / rs.norm(a) * n(b, g)
            return rs.norm(g) / rs.norm(b) * n(g, a)

        gamma, delta = extraspecial[xi]
        p = root_string(rs, delta, gamma)[0]
        if (a, b) == (gamma, delta):
            return Fraction(p + 1)
        if (a, b) == (delta, gamma):
            return Fraction(-(p + 1))

        total = Fraction(0)
        if rs.is_root(bg := _sub(b, gamma)):
            total += n(b, negate(gamma)) * n(a, negate(delta)) / rs.norm(bg)
        if rs.is_root(ag := _sub(a, gamma)):
            total += n(negate(gamma), a) * n(b, negate(delta)) / rs.norm(ag)
        return -rs.norm(xi) * total / n(negate(gamma), negate(delta))

    constants = {}
    for a in rs.roots:
        for b in rs.roots:
            if not rs.is_root(add_roots(a, b)):
                continue
            value = n(a, b)
            p = root_string(rs, b, a)[0]
            if value.denominator != 1 or abs(value) != p + 1:
                raise StructureConstantError(
                    f'{rs.lie_type}: N({a}, {b}) = {value}, expected magnitude {p + 1}')
            constants[a, b] = int(value)
    return constants

@dataclass(frozen=True, kw_only=True, eq=False)
class StructureConstants:
    rs: RootSystem
    killing: KillingData
    chevalley: dict[tuple[int, int], dict[int, Fraction]]
    table: dict[tuple[int, int], tuple[tuple[int, Surd], ...]]
    chevalley_pairing: tuple[Fraction, ...]

    @property
    def n_roots(self) -> int:
        return len(self.rs.roots)

    @property
    def rank(self) -> int:
        return self.rs.rank

    @property
    def dim(self) -> int:
        return self.n_roots + self.rank

    def root_index(self, r: Root) -> int:
        return self.rs.index[r]

    def cartan_index(self, i: int) -> int:
        return self.n_roots + i

    @cached_property
    def cartan_slice(self) -> slice:
        return slice(self.n_roots, self.dim)

    @cached_property
    def kappa(self) -> tuple[Fraction, ...]:
        """kappa(e_phi, e_-phi) of the Chevalley basis predicted from root norms: 2I / B0(phi, phi)."""
        return tuple(2 * self.killing.scale / self.rs.norm(r) for r in self.rs.roots)

    @cached_property
    def pairing(self) -> tuple[Fraction, ...]:
        """kappa(e_phi, e_-phi) in the normalized basis."""
        return tuple(m / k for m, k in zip(self.chevalley_pairing, self.kappa))

    @cached_property
    def grades(self) -> np.ndarray:
        grade = heights(self.rs)
        return np.array([grade[r] for r in self.rs.roots] + [0] * self.rank, dtype=int)

    @cached_property
    def entries(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        rows, cols, targets, values = [], [], [], []
        for (i, j), terms in self.table.items():
            for k, s in terms:
                rows.append(i)
                cols.append(j)
                targets.append(k)
                values.append(float(s))
        return np.array(rows), np.array(cols), np.array(targets), np.array(values)

    @cached_property
    def killing_gram(self) -> np.ndarray:
        g = np.zeros((self.dim, self.dim))
        for i, r in enumerate(self.rs.roots):
            g[i, self.root_index(negate(r))] = 1.0
        g[self.cartan_slice, self.cartan_slice] = np.array(self.killing.gram, dtype=float)
        return g

    @cached_property
    def b_u_gram(self) -> np.ndarray:
        """Gram matrix of the positive definite form B_u(y, z) = -kappa(y, theta(conj z))."""
        g = np.eye(self.dim)
        g[self.cartan_slice, self.cartan_slice] = np.array(self.killing.gram, dtype=float)
        return g

    @cached_property
    def theta(self) -> np.ndarray:
        t = np.zeros((self.dim, self.dim))
        for i, r in enumerate(self.rs.roots):
            t[self.root_index(negate(r)), i] = -1.0
        t[self.cartan_slice, self.cartan_slice] = -np.eye(self.rank)
        return t

    @cached_property
    def _frame(self) -> tuple[np.ndarray, np.ndarray]:
        lower = np.linalg.cholesky(self.b_u_gram)
        return lower.T, np.linalg.inv(lower.T)

    def to_orthonormal(self, mat: np.ndarray) -> np.ndarray:
        """L^T mat L^-T with B_u = L L^T, so B_u-adjoints become transposes."""
        lt, lt_inv = self._frame
        return lt @ mat @ lt_inv

    def from_orthonormal(self, vectors: np.ndarray) -> np.ndarray:
        return self._frame[1] @ vectors

def _chevalley_table(rs: RootSystem,
                     constants: dict[tuple[Root, Root], int]) -> dict[tuple[int, int], dict[int, Fraction]]:
    """Brackets of the basis {e_phi} + {h_i = alpha_i^vee}."""
    n_roots, ell = len(rs.roots), rs.rank
    table: dict[tuple[int, int], dict[int, Fraction]] = {}
    for i, a in enumerate(rs.roots):
        for j, b in enumerate(rs.roots):
            s = add_roots(a, b)
            if not any(s):
                # h_phi = sum_k phi_k (alpha_k, alpha_k)/(phi, phi) h_k
                table[i, j] = {n_roots + k: a[k] * rs.base_form[k][k] / rs.norm(a)
                               for k in range(ell) if a[k]}
            elif (c := constants.get((a, b))):
                table[i, j] = {rs.index[s]: Fraction(c)}
    for k in range(ell):
        for j, b in enumerate(rs.roots):
            if c := rs.coroot_pairing(b, k):
                table[n_roots + k, j] = {j: Fraction(c)}
                table[j, n_roots + k] = {j: Fraction(-c)}
    return table

def _normalized_table(rs: RootSystem, kd: KillingData,
                      constants: dict[tuple[Root, Root], int]) -> dict[tuple[int, int], tuple[tuple[int, Surd], ...]]:
    """Brackets of the basis {e_phi / sqrt(kappa_phi)} + {t_i}."""
    n_roots, ell = len(rs.roots), rs.rank
    kappa = {r: 2 * kd.scale / rs.norm(r) for r in rs.roots}
    table = {}
    for i, a in enumerate(rs.roots):
        for j, b in enumerate(rs.roots):
            s = add_roots(a, b)
            if not any(s):
                table[i, j] = tuple((n_roots + k, Surd(Fraction(a[k]))) for k in range(ell) if a[k])
            elif (c := constants.get((a, b))):
                table[i, j] = ((rs.index[s], Surd(Fraction(c), kappa[s] / (kappa[a] * kappa[b]))),)
    for k in range(ell):
        for j, b in enumerate(rs.roots):
            value = sum((kd.gram[k][m] * b[m] for m in range(ell)), Fraction(0))
            if value:
                table[n_roots + k, j] = ((j, Surd(value)),)
                table[j, n_roots + k] = ((j, Surd(-value)),)
    return table

def _sparse_bracket(table: dict, u: dict[int, Fraction], v: dict[int, Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for i, a in u.items():
        for j, b in v.items():
            for k, c in table.get((i, j), {}).items():
                out[k] = out.get(k, 0) + a * b * c
    return {k: c for k, c in out.items() if c}

def _adjoint_trace(table: dict, dim: int, i: int, j: int) -> Fraction:
    """trace(ad b_i ad b_j) over the sparse table."""
    total = Fraction(0)
    for m in range(dim):
        for l, c in table.get((j, m), {}).items():
            total += c * table.get((i, l), {}).get(m, 0)
    return total

def check_jacobi(table: dict, dim: int, triples, labels=None) -> int:
    """Exact Jacobi identity on the given basis triples; returns the number checked."""
    count = 0
    for i, j, k in triples:
        a, b, c = {int(i): Fraction(1)}, {int(j): Fraction(1)}, {int(k): Fraction(1)}
        total: dict[int, Fraction] = {}
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            for m, value in _sparse_bracket(table, x, _sparse_bracket(table, y, z)).items():
                total[m] = total.get(m, 0) + value
        if any(total.values()):
            names = [labels[t] if labels else t for t in (i, j, k)]
            raise JacobiIdentityError(f'Jacobi identity fails on {tuple(names)}')
        count += 1
    return count

def build_structure_constants(rs: RootSystem, kd: KillingData, jacobi_sample: int = 500,
                              seed: int = 0) -> StructureConstants:
    constants = chevalley_constants(rs)
    chevalley = _chevalley_table(rs, constants)
    n_roots, dim = len(rs.roots), len(rs.roots) + rs.rank

    for (i, j), terms in chevalley.items():
        if chevalley.get((j, i)) != {k: -c for k, c in terms.items()}:
            raise StructureConstantError(f'{rs.lie_type}: bracket ({i}, {j}) is not antisymmetric')

    labels = [str(r) for r in rs.roots] + [f'h{k + 1}' for k in range(rs.rank)]
    rng = np.random.default_rng(seed)
    checked = check_jacobi(chevalley, dim, rng.integers(0, dim, size=(jacobi_sample, 3)), labels)

    measured = tuple(_adjoint_trace(chevalley, dim, i, rs.index[negate(r)])
                     for i, r in enumerate(rs.roots))
    for k in range(rs.rank):
        for m in range(rs.rank):
            # kappa(h_k, h_m) = 4 I B0_km / (d_k d_m)
            expected = 4 * kd.scale * rs.base_form[k][m] / (rs.base_form[k][k] * rs.base_form[m][m])
            if _adjoint_trace(chevalley, dim, n_roots + k, n_roots + m) != expected:
                raise StructureConstantError(f'{rs.lie_type}: kappa(h{k + 1}, h{m + 1}) != {expected}')

    sc = StructureConstants(rs=rs, killing=kd, chevalley=chevalley,
                            table=_normalized_table(rs, kd, constants),
                            chevalley_pairing=measured)
    if any(p != 1 for p in sc.pairing):
        bad = next(r for r, p in zip(rs.roots, sc.pairing) if p != 1)
        raise StructureConstantError(f'{rs.lie_type}: kappa(e{bad}, e-{bad}) != 1 after normalization')

    logger.info(f'{rs.lie_type}: structure constants built, dim {dim}, '
                f'{len(constants)} root brackets, Jacobi checked on {checked} triples')
    return sc

def ad_matrix(sc: StructureConstants, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    if v.shape != (sc.dim,):
        raise DimensionMismatchError(f'vector of shape {v.shape} for a {sc.dim}-dimensional algebra')
    rows, cols, targets, values = sc.entries
    mat = np.zeros((sc.dim, sc.dim), dtype=np.result_type(v.dtype, float))
    np.add.at(mat, (targets, cols), v[rows] * values)
    return mat

def bracket(sc: StructureConstants, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return ad_matrix(sc, u) @ np.asarray(v)

def basis_vector(sc: StructureConstants, index: int) -> np.ndarray:
    v = np.zeros(sc.dim)
    v[index] = 1.0
    return v

@dataclass(frozen=True, kw_only=True, eq=False)
class CyclicElement:
    x: np.ndarray
    x_minus: np.ndarray
    beta: tuple[float, ...]
    marks: tuple[int, ...]
    lowest_index: int
    highest_index: int
    simple_indices: tuple[int, ...]
    negative_simple_indices: tuple[int, ...]
    t_beta: float = 1.0

    @property
    def x_plus(self) -> np.ndarray:
        """The principal nilpotent part x - e_-psi."""
        v = self.x.copy()
        v[self.lowest_index] = 0.0
        return v

def build_cyclic_element(sc: StructureConstants, hr: HighestRootData) -> CyclicElement:
    n = sc.rank
    lowest = sc.root_index(negate(hr.psi))
    highest = sc.root_index(hr.psi)
    simple = tuple(sc.root_index(unit_root(n, i)) for i in range(n))
    negative = tuple(sc.root_index(negate(unit_root(n, i))) for i in range(n))
    beta = (1.0,) + tuple(math.sqrt(m) for m in hr.marks)

    x = np.zeros(sc.dim)
    x_minus = np.zeros(sc.dim)
    x[lowest] = x_minus[highest] = 1.0
    x[list(simple)] = beta[1:]
    x_minus[list(negative)] = beta[1:]
    return CyclicElement(x=x, x_minus=x_minus, beta=beta, marks=hr.marks, lowest_index=lowest,
                         highest_index=highest, simple_indices=simple,
                         negative_simple_indices=negative)

@dataclass(frozen=True, kw_only=True)
class ModulusClass:
    modulus: float
    multiplicity: int
    members: tuple[int, ...]

@dataclass(frozen=True, kw_only=True)
class OracleRadius:
    radius: float
    weight: int

@dataclass(frozen=True, kw_only=True, eq=False)
class SpectralReport:
    nonzero_eigs: np.ndarray
    eigenvectors: np.ndarray
    kernel_dim: int
    modulus_classes: tuple[ModulusClass, ...]
    coxeter_number: int

    @property
    def oracle_radii(self) -> list[OracleRadius]:
        return oracle_radii(self, self.coxeter_number)

    @cached_property
    def class_of(self) -> np.ndarray:
        out = np.zeros(len(self.nonzero_eigs), dtype=int)
        for c, cls in enumerate(self.modulus_classes):
            out[list(cls.members)] = c
        return out

def tilde_ad(sc: StructureConstants, v: np.ndarray) -> np.ndarray:
    return sc.to_orthonormal(ad_matrix(sc, v))

def spectrum(sc: StructureConstants, ce: CyclicElement, gap: float = 1e-7,
             kernel_tol: float = 1e-8, class_tol: float = 1e-6) -> SpectralReport:
    """
    Eigen-decomposition of ad x.

    ad x is normal for B_u with adjoint ad x_minus, so in a B_u-orthonormal
    frame it is a real normal matrix and splits into commuting symmetric and
    skew parts; see normal_eigensystem.
    """
    h = int(sc.grades.max()) + 1
    values, vectors = normal_eigensystem(tilde_ad(sc, ce.x), gap)
    vectors = sc.from_orthonormal(vectors)

    moduli = np.abs(values)
    nonzero = moduli > kernel_tol * moduli.max()
    kernel_dim = int(np.sum(~nonzero))
    values, vectors, moduli = values[nonzero], vectors[:, nonzero], moduli[nonzero]

    order, classes = [], []
    for group in relative_groups(list(moduli), class_tol):
        group = sorted(group, key=lambda k: np.angle(values[k]))
        start = len(order)
        order += group
        classes.append(ModulusClass(modulus=float(np.mean(moduli[group])),
                                    multiplicity=len(group),
                                    members=tuple(range(start, len(order)))))

    for cls in classes:
        if cls.multiplicity % h:
            raise SpectrumError(f'{sc.rs.lie_type}: modulus class {cls.modulus:.12g} has '
                                f'multiplicity {cls.multiplicity}, not a multiple of h = {h}')

    logger.info(f'{sc.rs.lie_type}: ad x has {len(order)} nonzero eigenvalues in '
                f'{len(classes)} modulus classes, kernel dimension {kernel_dim}')
    return SpectralReport(nonzero_eigs=values[order], eigenvectors=vectors[:, order],
                          kernel_dim=kernel_dim, modulus_classes=tuple(classes), coxeter_number=h)

def oracle_radii(sr: SpectralReport, h: int) -> list[OracleRadius]:
    """r = sqrt(2/h) |nu| per modulus class, ascending, weighted by multiplicity / h."""
    scale = math.sqrt(2 / h)
    return [OracleRadius(radius=scale * cls.modulus, weight=cls.multiplicity // h)
            for cls in sorted(sr.modulus_classes, key=lambda c: c.modulus)]

def oracle_eigenvalues(sr: SpectralReport, h: int) -> np.ndarray:
    """The radii squared repeated by weight, comparable to the spectrum of (2/h) A."""
    return np.array([r.radius ** 2 for r in oracle_radii(sr, h) for _ in range(r.weight)])

def modulus_spectrum(sc: StructureConstants, ce: CyclicElement, kernel_tol: float = 1e-8) -> np.ndarray:
    """Nonzero eigenvalues of ad(x) ad(x_minus), which are the |nu|^2."""
    prod = tilde_ad(sc, ce.x) @ tilde_ad(sc, ce.x_minus)
    values = np.linalg.eigvalsh((prod + prod.T) / 2)
    return np.sort(values[values > kernel_tol * values.max()])

@dataclass(frozen=True, kw_only=True)
class RegularityReport:
    dim: int
    rank: int
    rank_x: int
    rank_x2: int

    @property
    def kernel_dim(self) -> int:
        return self.dim - self.rank_x

    @property
    def is_regular(self) -> bool:
        return self.rank_x == self.rank_x2 == self.dim - self.rank

def regularity(sc: StructureConstants, ce: CyclicElement, tol: float = 1e-8) -> RegularityReport:
    xt = tilde_ad(sc, ce.x)
    scale = np.linalg.norm(xt, 2)
    return RegularityReport(dim=sc.dim, rank=sc.rank,
                            rank_x=int(np.linalg.matrix_rank(xt, tol=tol * scale)),
                            rank_x2=int(np.linalg.matrix_rank(xt @ xt, tol=tol * scale ** 2)))

def commutator_defect(sc: StructureConstants, ce: CyclicElement) -> float:
    """max |[x, x_minus]| over the basis coordinates."""
    return float(np.max(np.abs(bracket(sc, ce.x, ce.x_minus))))

def compact_defect(sc: StructureConstants, ce: CyclicElement) -> float:
    """Relative size of the B_u-self-adjoint part of ad(x - x_minus)."""
    yt = tilde_ad(sc, ce.x - ce.x_minus)
    return float(np.linalg.norm(yt + yt.T) / (2 * np.linalg.norm(yt)))

def rotation_defect(values: np.ndarray, h: int) -> float:
    """Largest distance from gamma * nu to the spectrum, relative to max |nu|."""
    values = np.asarray(values)
    rotated = values * np.exp(2j * np.pi / h)
    gaps = np.abs(rotated[:, None] - values[None, :]).min(axis=1)
    return float(gaps.max() / np.abs(values).max())

def zero_component_eigencheck(sc: StructureConstants, ce: CyclicElement, eigvec: np.ndarray,
                              nu_beta: complex, op: KostantOperator, tol: float = 1e-6) -> float:
    """||A z - |nu|^2 z|| / ||z|| for z the Cartan component of a nu-eigenvector of ad x."""
    eigvec = np.asarray(eigvec)
    vnorm = np.linalg.norm(eigvec)
    if np.linalg.norm(bracket(sc, ce.x, eigvec) - nu_beta * eigvec) > tol * abs(nu_beta) * vnorm:
        raise VerificationError(f'vector is not an eigenvector of ad x for {nu_beta:.6g}')

    z = eigvec[sc.cartan_slice]
    znorm = np.linalg.norm(z)
    if znorm <= 1e-10 * vnorm:
        raise ZeroProjectionError(f'Cartan component vanishes for eigenvalue {nu_beta:.6g}')
    a = np.array(op.matrix_m, dtype=float)
    return float(np.linalg.norm(a @ z - abs(nu_beta) ** 2 * z) / znorm)

def orbit_representatives(sr: SpectralReport, tol: float = 1e-8) -> list[int]:
    """
    Eigenvector columns holding one vector per gamma-orbit.

    Within a modulus class, all columns of one eigenvalue nu are taken and the
    eigenvalues nu * gamma^k are then marked as covered, until the class is used up.
    """
    h = sr.coxeter_number
    gamma = np.exp(2j * np.pi / h)
    picks = []
    for cls in sr.modulus_classes:
        covered: set[int] = set()
        chosen = 0
        for k in cls.members:
            if k in covered:
                continue
            nu = sr.nonzero_eigs[k]
            orbit = nu * gamma ** np.arange(h)
            for m in cls.members:
                if np.min(np.abs(orbit - sr.nonzero_eigs[m])) <= tol * abs(nu):
                    covered.add(m)
            same = [m for m in cls.members if abs(sr.nonzero_eigs[m] - nu) <= tol * abs(nu)]
            picks += same
            chosen += len(same)
        if chosen * h != cls.multiplicity:
            raise VerificationError(f'{chosen} orbit representatives in a class of '
                                    f'{cls.multiplicity}, h = {h}')
    return picks

def z_rank(sc: StructureConstants, sr: SpectralReport, tol: float = 1e-8) -> int:
    """Rank of the Cartan components of one eigenvector per gamma-orbit; rank l means they form a basis."""
    z = sr.eigenvectors[sc.cartan_slice, orbit_representatives(sr)]
    z = z / np.linalg.norm(z, axis=0)
    return int(np.linalg.matrix_rank(z, tol=tol * np.sqrt(z.shape[1])))

@dataclass(frozen=True, kw_only=True, eq=False)
class GradedVector:
    components: dict[int, np.ndarray]
    nu: complex
    residual: float
    # ||z - P z|| / ||z||, P the projection onto the A-eigenspace; 0 without op
    purification: float = 0.0

    def assemble(self) -> np.ndarray:
        return sum(self.components.values())

    @property
    def support(self) -> list[int]:
        return sorted(k for k, v in self.components.items() if np.any(v))

def _mp_operator(sc: StructureConstants, coefficients: dict[int, object]) -> list[tuple[int, int, object]]:
    """Sparse ad of sum_i c_i b_i as (row, col, value) triples at the working precision."""
    acc: dict[tuple[int, int], object] = {}
    for (i, j), terms in sc.table.items():
        if i in coefficients:
            for k, s in terms:
                acc[k, j] = acc.get((k, j), 0) + coefficients[i] * s.to_mp()
    return [(k, j, c) for (k, j), c in sorted(acc.items())]

def _mp_apply(op: list[tuple[int, int, object]], vec: list, dim: int) -> list:
    out = [mp.mpc(0)] * dim
    for k, j, c in op:
        if vec[j]:
            out[k] += c * vec[j]
    return out

def _mp_norm(vec: list):
    return mp.sqrt(mp.fsum(abs(c) ** 2 for c in vec))

def _purify(op: KostantOperator, z: list, target) -> tuple[list, object]:
    """Project z onto the eigenspace of A closest to target, in extended precision."""
    n = op.rank
    k = mp_matrix(op.gram.gram)
    chol = mp.cholesky(k)
    values, q = mp.eigsy(chol.T * mp_matrix(op.weights) * chol)
    picks = [j for j in range(n) if abs(values[j] - target) <= 1e-6 * target]
    if not picks:
        raise ReconstructionError(f'no eigenvalue of A near {mp.nstr(target, 10)}')

    # columns of y are K-orthonormal eigenvectors of A
    y = mp.inverse(chol.T) * q
    kz = [mp.fsum(k[r, s] * z[s] for s in range(n)) for r in range(n)]
    coeffs = [mp.fsum(y[r, j] * kz[r] for r in range(n)) for j in picks]
    projected = [mp.fsum(y[r, j] * c for j, c in zip(picks, coeffs)) for r in range(n)]
    return projected, mp.fsum(values[j] for j in picks) / len(picks)

def reconstruct_root_vector(sc: StructureConstants, ce: CyclicElement, z: np.ndarray,
                            nu_beta: complex, *, op: KostantOperator | None = None,
                            dps: int = 50, tol: float = 1e-9) -> GradedVector:
    """
    Rebuild the nu-eigenvector of ad x from its Cartan component z.

    Positive grades come from v(k) = nu^-k (ad x_+)^k z and negative grades from
    v(-k) = conj(nu)^-k (ad x_-')^k z, x_+ and x_-' being the principal nilpotent
    parts of x and x_minus. The recursion multiplies rounding errors from other
    eigenvalues by (|mu| / |nu|)^k, so it runs in mpmath at `dps` digits. When
    `op` is given, z is first projected onto its A-eigenspace and |nu| refined
    from the eigenvalue of A; the relative size of the discarded part is kept
    as `purification` so that a z far from any eigenspace still shows up.
    Otherwise the k = 0 component is z itself.
    """
    h = int(sc.grades.max()) + 1
    dim, z = sc.dim, np.asarray(z, dtype=complex)
    if z.shape != (sc.rank,):
        raise DimensionMismatchError(f'Cartan vector of shape {z.shape}, rank is {sc.rank}')
    if not np.any(z):
        raise ZeroProjectionError('zero Cartan vector has no root vector')

    with _MP_LOCK, mp.workdps(dps):
        z_mp = [mp.mpc(c.real, c.imag) for c in z]
        nu = mp.mpc(nu_beta.real, nu_beta.imag)
        purification = 0.0
        if op is not None:
            projected, eigenvalue = _purify(op, z_mp, abs(nu) ** 2)
            purification = float(_mp_norm([a - b for a, b in zip(z_mp, projected)]) / _mp_norm(z_mp))
            z_mp = projected
            nu = mp.sqrt(eigenvalue) * nu / abs(nu)

        sqrt_marks = [mp.sqrt(m) for m in ce.marks]
        x_plus = _mp_operator(sc, dict(zip(ce.simple_indices, sqrt_marks)))
        x_minus_prime = _mp_operator(sc, dict(zip(ce.negative_simple_indices, sqrt_marks)))
        full_x = _mp_operator(sc, {**dict(zip(ce.simple_indices, sqrt_marks)), ce.lowest_index: 1})

        base = [mp.mpc(0)] * dim
        base[sc.n_roots:] = z_mp
        components = {0: base}
        for sign, step, scale in ((1, x_plus, nu), (-1, x_minus_prime, mp.conj(nu))):
            current = base
            for k in range(1, h + 1):
                current = [c / scale for c in _mp_apply(step, current, dim)]
                components[sign * k] = current

        v = [mp.fsum(comp[m] for comp in components.values()) for m in range(dim)]
        vnorm = _mp_norm(v)
        if vnorm == 0:
            raise ZeroProjectionError('reconstructed vector is zero')
        for k in (h, -h):
            if _mp_norm(components.pop(k)) > mp.mpf(10) ** (-(dps // 2)) * vnorm:
                raise ReconstructionError(f'nonzero component at grade {k}, h = {h}')

        image = _mp_apply(full_x, v, dim)
        residual = float(_mp_norm([a - nu * b for a, b in zip(image, v)]) / vnorm)
        out = {k: np.array([complex(c) for c in comp]) for k, comp in sorted(components.items())}
        nu_out = complex(nu)

    logger.debug(f'reconstruction for nu = {nu_out:.6g}: residual {residual:.3e}, purification {purification:.3e}')
    if residual > tol:
        raise ReconstructionError(f'reconstructed vector has eigen-residual {residual:.3e} > {tol:g}')
    return GradedVector(components=out, nu=nu_out, residual=residual, purification=purification)
