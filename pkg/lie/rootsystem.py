"""
Exact root systems of the complex simple Lie algebras of rank > 1.

Roots are stored as integer coordinate tuples in the basis of simple roots,
following the Bourbaki numbering of each family:

    A_n  1 - 2 - ... - n
    B_n  1 - 2 - ... - (n-1) => n        (alpha_n short)
    C_n  1 - 2 - ... - (n-1) <= n        (alpha_n long)
    D_n  1 - 2 - ... - (n-2) < (n-1), n
    E_n  1 - 3 - 4 - 5 - ... - n, with 2 attached to 4
    F_4  1 - 2 => 3 - 4                  (alpha_1, alpha_2 long)
    G_2  1 <= 2                          (alpha_1 short)

cartan[i][j] = <alpha_j, alpha_i^vee> = 2(alpha_i, alpha_j)/(alpha_i, alpha_i).
The base form B0 is normalized so that long roots have norm 2; the
Killing-form inner product on h* is B0 / I with I = 2 h^vee.
"""
from __future__ import annotations
import numpy as np
from collections import deque
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from functools import cached_property
from re import compile
from loguru import logger
from .utils import GossetUsageError, VerificationError, rational_matrix

Root = tuple[int, ...]

class Family(StrEnum):
    A = 'A'
    B = 'B'
    C = 'C'
    D = 'D'
    E = 'E'
    F = 'F'
    G = 'G'

class InvalidRankError(GossetUsageError):
    """Raised for a (family, rank) pair that does not name an admitted simple type."""

TYPE_LABEL_PATTERN = compile(r'^\s*([A-Ga-g])\s*(\d+)\s*$')

@dataclass(frozen=True)
class LieType:
    family: Family
    rank: int

    def __post_init__(self):
        try:
            object.__setattr__(self, 'family', Family(str(self.family).upper()))
        except ValueError:
            raise InvalidRankError(f'Unknown family "{self.family}"') from None

        ell = self.rank
        if ell < 2:
            raise InvalidRankError(f'{self.family}{ell}: rank must be at least 2')

        match self.family:
            case Family.D if ell == 3:
                raise InvalidRankError('D3 is not admitted, it is the same system as A3')
            case Family.D if ell < 4:
                raise InvalidRankError(f'D{ell}: rank must be at least 4')
            case Family.E if ell not in (6, 7, 8):
                raise InvalidRankError(f'E{ell}: rank must be 6, 7 or 8')
            case Family.F if ell != 4:
                raise InvalidRankError(f'F{ell}: rank must be 4')
            case Family.G if ell != 2:
                raise InvalidRankError(f'G{ell}: rank must be 2')

    @classmethod
    def parse(cls, label: str) -> LieType:
        if m := TYPE_LABEL_PATTERN.match(label):
            return cls(Family(m.group(1).upper()), int(m.group(2)))
        raise InvalidRankError(f'Cannot parse Lie type "{label}", expected e.g. "E8" or "A3"')

    def __str__(self) -> str:
        return f'{self.family}{self.rank}'

@dataclass(frozen=True, kw_only=True, eq=False)
class RootSystem:
    lie_type: LieType
    cartan: tuple[tuple[int, ...], ...]
    base_form: np.ndarray
    roots: tuple[Root, ...]

    @property
    def rank(self) -> int:
        return len(self.cartan)

    @property
    def simple_roots(self) -> tuple[Root, ...]:
        return tuple(unit_root(self.rank, i) for i in range(self.rank))

    @cached_property
    def positive_roots(self) -> tuple[Root, ...]:
        return tuple(r for r in self.roots if sum(r) > 0)

    @cached_property
    def index(self) -> dict[Root, int]:
        return {r: k for k, r in enumerate(self.roots)}

    @cached_property
    def _root_set(self) -> frozenset[Root]:
        return frozenset(self.roots)

    def is_root(self, r: Root) -> bool:
        return r in self._root_set

    def form(self, a: Root, b: Root) -> Fraction:
        """B0(a, b) for coordinate vectors a, b."""
        n = self.rank
        return sum((a[i] * b[j] * self.base_form[i][j]
                    for i in range(n) for j in range(n) if a[i] and b[j]), Fraction(0))

    @cached_property
    def norms(self) -> dict[Root, Fraction]:
        return {r: self.form(r, r) for r in self.roots}

    def norm(self, a: Root) -> Fraction:
        if (value := self.norms.get(a)) is not None:
            return value
        return self.form(a, a)

    def coroot_pairing(self, a: Root, i: int) -> int:
        """<a, alpha_i^vee>."""
        return sum(self.cartan[i][j] * a[j] for j in range(self.rank))

    def reflect(self, a: Root, i: int) -> Root:
        pairing = self.coroot_pairing(a, i)
        return tuple(c - pairing if j == i else c for j, c in enumerate(a))

@dataclass(frozen=True, kw_only=True)
class HighestRootData:
    psi: Root
    marks: tuple[int, ...]
    n0: int = 1
    coxeter_number: int
    height_of_psi: int

@dataclass(frozen=True, kw_only=True, eq=False)
class KillingData:
    gram: np.ndarray
    scale: Fraction
    dual_coxeter: int

def unit_root(n: int, i: int) -> Root:
    return tuple(int(j == i) for j in range(n))

def add_roots(a: Root, b: Root) -> Root:
    return tuple(x + y for x, y in zip(a, b))

def negate(a: Root) -> Root:
    return tuple(-x for x in a)

def height(a: Root) -> int:
    return sum(a)

def cartan_matrix(t: LieType) -> list[list[int]]:
    n = t.rank
    c = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i: int, j: int, a_ij: int = -1, a_ji: int = -1):
        c[i][j] = a_ij
        c[j][i] = a_ji

    match t.family:
        case Family.A:
            for i in range(n - 1):
                link(i, i + 1)
        case Family.B:
            for i in range(n - 2):
                link(i, i + 1)
            link(n - 2, n - 1, -1, -2)
        case Family.C:
            for i in range(n - 2):
                link(i, i + 1)
            link(n - 2, n - 1, -2, -1)
        case Family.D:
            for i in range(n - 2):
                link(i, i + 1)
            link(n - 3, n - 1)
        case Family.E:
            for i, j in [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)]:
                if j < n:
                    link(i, j)
        case Family.F:
            link(0, 1)
            link(1, 2, -1, -2)
            link(2, 3)
        case Family.G:
            link(0, 1, -3, -1)
    return c

def _symmetrizer(cartan: list[list[int]]) -> list[Fraction]:
    """Root norms d_i with d_i * cartan[i][j] symmetric and max(d) = 2."""
    n = len(cartan)
    d: list[Fraction | None] = [None] * n
    d[0] = Fraction(1)
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in range(n):
            if j != i and cartan[i][j] and d[j] is None:
                d[j] = d[i] * cartan[i][j] / cartan[j][i]
                queue.append(j)
    top = max(d)
    return [2 * x / top for x in d]

def build_root_system(t: LieType) -> RootSystem:
    """Generate all roots by closing the simple roots under simple reflections."""
    cartan = cartan_matrix(t)
    n = t.rank
    d = _symmetrizer(cartan)
    base_form = rational_matrix([[d[i] * cartan[i][j] / 2 for j in range(n)] for i in range(n)])
    if not (base_form == base_form.T).all():
        raise VerificationError(f'{t}: base form is not symmetric, check the Cartan matrix')

    shell = RootSystem(lie_type=t, cartan=tuple(map(tuple, cartan)),
                       base_form=base_form, roots=())
    found = set(shell.simple_roots)
    frontier = list(found)
    while frontier:
        fresh = []
        for root in frontier:
            for i in range(n):
                image = shell.reflect(root, i)
                if image not in found:
                    found.add(image)
                    fresh.append(image)
        frontier = fresh

    roots = tuple(sorted(found, key=lambda r: (height(r), r)))
    rs = RootSystem(lie_type=t, cartan=shell.cartan, base_form=base_form, roots=roots)

    h = 1 + height(roots[-1])
    if len(roots) != n * h:
        raise VerificationError(f'{t}: generated {len(roots)} roots, expected rank*h = {n * h}')
    logger.debug(f'{t}: generated {len(roots)} roots, Coxeter number {h}')
    return rs

def permute_simple_roots(rs: RootSystem, order: list[int]) -> RootSystem:
    """Renumber the simple roots: new alpha_i is old alpha_{order[i]}."""
    n = rs.rank
    if sorted(order) != list(range(n)):
        raise GossetUsageError(f'{order} is not a permutation of 0..{n - 1}')
    cartan = tuple(tuple(rs.cartan[order[i]][order[j]] for j in range(n)) for i in range(n))
    base_form = rational_matrix([[rs.base_form[order[i]][order[j]] for j in range(n)]
                                 for i in range(n)])
    roots = tuple(sorted((tuple(r[order[i]] for i in range(n)) for r in rs.roots),
                         key=lambda r: (height(r), r)))
    return RootSystem(lie_type=rs.lie_type, cartan=cartan, base_form=base_form, roots=roots)

def heights(rs: RootSystem) -> dict[Root, int]:
    """o(phi) = <phi, w> where <alpha_i, w> = 1, i.e. the coordinate sum."""
    return {r: height(r) for r in rs.roots}

def highest_root(rs: RootSystem) -> HighestRootData:
    psi = max(rs.roots, key=lambda r: (height(r), r))
    for i, alpha in enumerate(rs.simple_roots):
        if rs.is_root(add_roots(psi, alpha)):
            raise VerificationError(f'{rs.lie_type}: psi + alpha_{i + 1} is a root')
    if min(psi) < 1:
        raise VerificationError(f'{rs.lie_type}: highest root {psi} has a non-positive mark')
    return HighestRootData(psi=psi,
                           marks=psi,
                           coxeter_number=1 + height(psi),
                           height_of_psi=height(psi))

def comarks(rs: RootSystem, hr: HighestRootData) -> tuple[Fraction, ...]:
    """n_i^vee = n_i (alpha_i, alpha_i) / (psi, psi)."""
    psi_norm = rs.norm(hr.psi)
    return tuple(n_i * rs.base_form[i][i] / psi_norm for i, n_i in enumerate(hr.marks))

def dual_coxeter_number(rs: RootSystem, hr: HighestRootData | None = None) -> int:
    hr = hr or highest_root(rs)
    value = 1 + sum(comarks(rs, hr))
    if value.denominator != 1:
        raise VerificationError(f'{rs.lie_type}: non-integral dual Coxeter number {value}')
    return int(value)

def killing_gram(rs: RootSystem) -> KillingData:
    """
    Gram matrix of the simple roots under the Killing-form inner product.

    The Killing form on h satisfies kappa(x, y) = sum_phi phi(x) phi(y), so its
    dual on h* is B0 / I with I = (sum_phi B0(phi, phi)) / rank.
    """
    total = sum((rs.norm(r) for r in rs.roots), Fraction(0))
    scale = total / rs.rank
    h_dual = dual_coxeter_number(rs)
    if scale != 2 * h_dual:
        raise VerificationError(f'{rs.lie_type}: Killing scale {scale} != 2 h^vee = {2 * h_dual}')
    gram = rational_matrix([[b / scale for b in row] for row in rs.base_form])
    return KillingData(gram=gram, scale=scale, dual_coxeter=h_dual)

def root_string(rs: RootSystem, chi: Root, phi: Root) -> tuple[int, int]:
    """(p, q) with chi - p phi, ..., chi + q phi the phi-string through chi."""
    p = 0
    while rs.is_root(tuple(c - (p + 1) * f for c, f in zip(chi, phi))):
        p += 1
    q = 0
    while rs.is_root(tuple(c + (q + 1) * f for c, f in zip(chi, phi))):
        q += 1
    return p, q
