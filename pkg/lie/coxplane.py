"""
Coxeter-plane projection of the root system of h(beta) and figure output.

A root nu of h(beta) lands at sqrt(2/h) * nu(x) read as (x, y), so the figure is
drawn straight from the spectrum of ad x. Edges need the inner products
(w_nu, w_mu), which come from evaluating every root on a basis of h(beta).
"""
from __future__ import annotations
import csv
import io
import math
import numpy as np
import svgwrite
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from loguru import logger
from .apposition import StructureConstants, CyclicElement, SpectralReport, tilde_ad
from .utils import GossetUsageError, VerificationError, normal_eigensystem, relative_groups

CSV_COLUMNS = ('x', 'y', 'radius', 'class_index', 're_nu', 'im_nu')

DEFAULT_PALETTE = ('#1f77b4', '#ff7f0e', '#2ca02c', '#d62728',
                   '#9467bd', '#8c564b', '#e377c2', '#17becf')

class EdgeMode(StrEnum):
    NONE = 'none'
    POLYTOPE = 'polytope'

class FunctionalError(VerificationError):
    """Joint diagonalization of h(beta) failed."""

@dataclass(frozen=True, kw_only=True)
class PlanePoint:
    x: float
    y: float
    orbit_class: int
    source_eig: complex

    @property
    def radius(self) -> float:
        return math.hypot(self.x, self.y)

@dataclass(frozen=True, kw_only=True)
class CanvasStyle:
    size: int = 800
    margin: int = 40
    circle_stroke: float = 0.6
    edge_stroke: float = 0.25
    point_radius: float = 3.0
    palette: tuple[str, ...] = DEFAULT_PALETTE
    background: str = 'white'
    circle_color: str = '#9a9a9a'
    edge_color: str = '#c8c8c8'

@dataclass(frozen=True, kw_only=True)
class FigureSpec:
    points: tuple[PlanePoint, ...]
    circle_radii: tuple[float, ...]
    edges: tuple[tuple[int, int], ...] = ()
    canvas: CanvasStyle = field(default_factory=CanvasStyle)
    title: str = ''

@dataclass(frozen=True, kw_only=True, eq=False)
class RootFunctionals:
    basis: np.ndarray
    basis_t: np.ndarray
    values: np.ndarray
    gram_h: np.ndarray
    nu: np.ndarray
    gram: np.ndarray

    @property
    def count(self) -> int:
        return len(self.nu)

def _phase(values: np.ndarray, rel_tol: float = 1e-6) -> complex:
    """Unit factor putting the largest-modulus value with maximal real part on the +x axis."""
    moduli = np.abs(values)
    top = np.flatnonzero(moduli >= moduli.max() * (1 - rel_tol))
    k = top[np.argmax(values[top].real)]
    return np.conj(values[k]) / moduli[k]

def modulus_classes(values: np.ndarray, rel_tol: float = 1e-6) -> np.ndarray:
    out = np.zeros(len(values), dtype=int)
    for c, group in enumerate(relative_groups(list(np.abs(values)), rel_tol)):
        out[group] = c
    return out

def project_values(values: np.ndarray, h: int, classes: np.ndarray | None = None) -> list[PlanePoint]:
    values = np.asarray(values, dtype=complex)
    classes = modulus_classes(values) if classes is None else classes
    points = math.sqrt(2 / h) * values * _phase(values)
    return [PlanePoint(x=float(p.real), y=float(p.imag), orbit_class=int(c), source_eig=complex(v))
            for p, c, v in zip(points, classes, values)]

def project_spectrum(sr: SpectralReport, h: int) -> list[PlanePoint]:
    return project_values(sr.nonzero_eigs, h, sr.class_of)

def _canonical_order(nu: np.ndarray) -> list[int]:
    order = []
    for group in relative_groups(list(np.abs(nu)), 1e-6):
        order += sorted(group, key=lambda k: np.angle(nu[k]))
    return order

def root_functionals(sc: StructureConstants, ce: CyclicElement, sr: SpectralReport,
                     seed: int = 0, tol: float = 1e-7) -> RootFunctionals:
    """
    Evaluate every root of h(beta) on a basis b_1..b_l of h(beta) = ker ad x.

    The root vectors are the eigenvectors of ad y for a generic real y in h(beta);
    nu(b_i) is then the Rayleigh quotient of ad b_i on the root vector. Killing
    inner products of the duals w_nu follow from the Gram matrix of the b_i.
    """
    ell = sc.rank
    xt = tilde_ad(sc, ce.x)
    _, s, vt = np.linalg.svd(xt)
    if s[-ell] > 1e-8 * s[0] or s[-ell - 1] <= 1e-8 * s[0]:
        raise FunctionalError(f'{sc.rs.lie_type}: ker ad x does not have dimension {ell}')
    basis_t = vt[-ell:].T
    basis = sc.from_orthonormal(basis_t)

    rng = np.random.default_rng(seed)
    yt = tilde_ad(sc, basis @ rng.normal(size=ell))
    eigs, vecs = normal_eigensystem(yt)
    mask = np.abs(eigs) > 1e-8 * np.abs(eigs).max()
    if mask.sum() != sc.n_roots:
        raise FunctionalError(f'{sc.rs.lie_type}: {mask.sum()} root vectors, expected {sc.n_roots}')
    u = vecs[:, mask]

    columns = []
    for i in range(ell):
        op = tilde_ad(sc, basis[:, i])
        f = np.einsum('ij,ik,kj->j', u.conj(), op, u)
        if np.linalg.norm(op @ u - u * f, axis=0).max() > tol * max(np.linalg.norm(op), 1.0):
            raise FunctionalError(f'{sc.rs.lie_type}: element of h(beta) is not generic, try another seed')
        columns.append(f)
    values = np.stack(columns, axis=1)

    gram_h = basis.T @ sc.killing_gram @ basis
    x_coords = np.linalg.lstsq(basis, ce.x, rcond=None)[0]
    nu = values @ x_coords
    order = _canonical_order(nu)
    values, nu = values[order], nu[order]

    gram = values @ np.linalg.solve(gram_h, values.T)
    if np.abs(gram.imag).max() > 1e-6 * np.abs(gram).max():
        raise FunctionalError(f'{sc.rs.lie_type}: root inner products are not real')

    logger.debug(f'{sc.rs.lie_type}: evaluated {len(nu)} roots on h(beta), seed {seed}')
    return RootFunctionals(basis=basis, basis_t=basis_t, values=values, gram_h=gram_h,
                           nu=nu, gram=gram.real)

def edges(gram: np.ndarray, mode: EdgeMode = EdgeMode.POLYTOPE, tol: float = 1e-6) -> list[tuple[int, int]]:
    """Pairs i < j whose inner product attains the maximal off-diagonal value."""
    if EdgeMode(mode) is EdgeMode.NONE:
        return []
    off = np.array(gram, dtype=float)
    np.fill_diagonal(off, -np.inf)
    top = off.max()
    i, j = np.nonzero(off >= top - tol * abs(top))
    return sorted((int(a), int(b)) for a, b in zip(i, j) if a < b)

def project_functionals(rf: RootFunctionals, sc: StructureConstants, h: int,
                        exponent: int = 1) -> list[PlanePoint]:
    """
    Points for the Coxeter plane of the eigenvalue gamma^m of the Coxeter element.

    m must be prime to h; gamma^m is then a simple eigenvalue on h(beta). The
    points are scaled to the same total squared length as the m = 1 figure.
    """
    if math.gcd(exponent, h) != 1:
        raise GossetUsageError(f'exponent {exponent} is not prime to h = {h}')
    gamma = np.exp(2j * np.pi / h)
    rotation = sc.to_orthonormal(np.diag(gamma ** sc.grades))
    sigma = rf.basis_t.T @ rotation @ rf.basis_t
    values, vectors = np.linalg.eig(sigma)
    hits = np.flatnonzero(np.abs(values - gamma ** exponent) < 1e-6)
    if len(hits) != 1:
        raise GossetUsageError(f'gamma^{exponent} has multiplicity {len(hits)} on h(beta)')

    nu = rf.values @ vectors[:, hits[0]]
    nu *= math.sqrt(np.sum(np.abs(rf.nu) ** 2) / np.sum(np.abs(nu) ** 2))
    return project_values(nu, h)

def build_figure(points: list[PlanePoint], edge_list: list[tuple[int, int]] = (),
                 canvas: CanvasStyle | None = None, title: str = '') -> FigureSpec:
    by_class: dict[int, list[float]] = {}
    for p in points:
        by_class.setdefault(p.orbit_class, []).append(p.radius)
    radii = tuple(float(np.mean(by_class[c])) for c in sorted(by_class))
    return FigureSpec(points=tuple(points), circle_radii=radii, edges=tuple(edge_list),
                      canvas=canvas or CanvasStyle(), title=title)

def _f(value: float) -> str:
    # -0.000000 and 0.000000 must render the same
    text = f'{value:.6f}'
    return '0.000000' if text == '-0.000000' else text

def render_svg(fig: FigureSpec) -> str:
    style = fig.canvas
    center = style.size / 2
    scale = (center - style.margin) / max(fig.circle_radii)

    def at(p: PlanePoint) -> tuple[str, str]:
        return _f(center + scale * p.x), _f(center - scale * p.y)

    dwg = svgwrite.Drawing(size=(f'{style.size}px', f'{style.size}px'), debug=False)
    dwg.add(dwg.rect(insert=(0, 0), size=('100%', '100%'), fill=style.background))
    if fig.title:
        dwg.set_desc(title=fig.title)

    if fig.edges:
        lines = dwg.add(dwg.g(id='edges', stroke=style.edge_color, stroke_width=_f(style.edge_stroke)))
        for i, j in fig.edges:
            lines.add(dwg.line(start=at(fig.points[i]), end=at(fig.points[j])))

    circles = dwg.add(dwg.g(id='gosset-circles', fill='none', stroke=style.circle_color,
                            stroke_width=_f(style.circle_stroke)))
    for r in fig.circle_radii:
        circles.add(dwg.circle(center=(_f(center), _f(center)), r=_f(scale * r)))

    roots = dwg.add(dwg.g(id='roots', stroke='none'))
    for p in fig.points:
        roots.add(dwg.circle(center=at(p), r=_f(style.point_radius),
                             fill=style.palette[p.orbit_class % len(style.palette)]))

    buffer = io.StringIO()
    dwg.write(buffer, pretty=True)
    return buffer.getvalue()

def emit_svg(fig: FigureSpec, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(render_svg(fig), encoding='utf-8')
    logger.info(f'SVG written to {path} ({len(fig.points)} points, {len(fig.circle_radii)} circles)')
    return path

def csv_rows(points: list[PlanePoint]) -> list[dict[str, str]]:
    return [{'x': _f(p.x), 'y': _f(p.y), 'radius': f'{p.radius:.12g}',
             'class_index': str(p.orbit_class),
             're_nu': f'{p.source_eig.real:.12g}', 'im_nu': f'{p.source_eig.imag:.12g}'}
            for p in points]

def emit_csv(points: list[PlanePoint], path: str | Path) -> Path:
    path = Path(path)
    with path.open('w', encoding='utf-8', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, lineterminator='\n')
        writer.writeheader()
        writer.writerows(csv_rows(points))
    logger.info(f'CSV written to {path} ({len(points)} rows)')
    return path
