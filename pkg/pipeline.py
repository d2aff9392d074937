import math
import time
import numpy as np
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable
from loguru import logger
from lie import rootsystem, kostant, apposition, coxplane
from lie.rootsystem import LieType
from lie.utils import VerificationError

@dataclass(kw_only=True)
class CheckResult:
    name: str
    passed: bool
    value: Any = None
    limit: Any = None
    detail: str = ''

@dataclass(kw_only=True)
class VerifyOutcome:
    lie_type: LieType
    discrepancy: float
    comparison: list[tuple[float, float, float]]
    checks: list[CheckResult]
    seconds: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

class GossetPipeline:
    """
    Lazily evaluated stages for one Lie type.

    Each stage is a cached property, so commands only pay for what they touch:
    `radii` never builds the adjoint representation, `verify` builds everything.
    """

    def __init__(self,
                 lie_type: LieType | str,
                 *,
                 tolerance: float = 1e-8,
                 seed: int = 0,
                 jacobi_sample: int = 500,
                 mp_dps: int = 50,
                 ):
        self.lie_type = LieType.parse(lie_type) if isinstance(lie_type, str) else lie_type
        self.tolerance = tolerance
        self.seed = seed
        self.jacobi_sample = jacobi_sample
        self.mp_dps = mp_dps

    @cached_property
    def root_system(self) -> rootsystem.RootSystem:
        return rootsystem.build_root_system(self.lie_type)

    @cached_property
    def highest(self) -> rootsystem.HighestRootData:
        return rootsystem.highest_root(self.root_system)

    @cached_property
    def killing(self) -> rootsystem.KillingData:
        return rootsystem.killing_gram(self.root_system)

    @property
    def h(self) -> int:
        return self.highest.coxeter_number

    @cached_property
    def operator(self) -> kostant.KostantOperator:
        return kostant.build_A(self.root_system, self.highest, self.killing)

    @cached_property
    def radii(self) -> kostant.RadiiReport:
        return kostant.radii_report(self.operator, self.h)

    @cached_property
    def charpoly(self) -> kostant.CharPolyReport:
        return kostant.char_poly(self.operator)

    @property
    def is_e8(self) -> bool:
        return kostant.is_e8(self.operator)

    @cached_property
    def families(self) -> tuple[int, ...] | None:
        return kostant.quartic_families(self.radii, self.charpoly) if self.is_e8 else None

    @property
    def labels(self) -> tuple[int, ...]:
        """Row labels for the radii: the E8 list for E8, the integer parts otherwise."""
        return kostant.table_labels(self.radii) if self.is_e8 else self.radii.integer_parts

    @cached_property
    def structure(self) -> apposition.StructureConstants:
        return apposition.build_structure_constants(self.root_system, self.killing,
                                                    self.jacobi_sample, self.seed)

    @cached_property
    def cyclic(self) -> apposition.CyclicElement:
        return apposition.build_cyclic_element(self.structure, self.highest)

    @cached_property
    def spectral(self) -> apposition.SpectralReport:
        return apposition.spectrum(self.structure, self.cyclic)

    @cached_property
    def functionals(self) -> coxplane.RootFunctionals:
        return coxplane.root_functionals(self.structure, self.cyclic, self.spectral, seed=self.seed)

    def golden(self) -> list[kostant.MassRelation]:
        pairs = kostant.golden_pairs(self.radii)
        return kostant.golden_relations(pairs, self.families)

    def oracle_comparison(self) -> list[tuple[float, float, float]]:
        """(eigenvalue of (2/h)A, oracle radius squared, relative difference), ascending."""
        oracle = apposition.oracle_eigenvalues(self.spectral, self.h)
        expected = np.array(self.radii.eigenvalues)
        if len(oracle) != len(expected):
            raise VerificationError(f'{self.lie_type}: oracle gives {len(oracle)} eigenvalues, '
                                    f'A has {len(expected)}')
        rel = np.abs(oracle - expected) / expected
        return [(float(a), float(b), float(r)) for a, b, r in zip(expected, oracle, rel)]

    def figure(self, edge_mode: coxplane.EdgeMode = coxplane.EdgeMode.NONE, exponent: int = 1,
               canvas: coxplane.CanvasStyle | None = None) -> coxplane.FigureSpec:
        edge_list = []
        if edge_mode is coxplane.EdgeMode.NONE and exponent == 1:
            points = coxplane.project_spectrum(self.spectral, self.h)
        else:
            points = coxplane.project_functionals(self.functionals, self.structure, self.h, exponent)
            edge_list = coxplane.edges(self.functionals.gram, edge_mode)
        title = f'{self.lie_type} Coxeter plane, h = {self.h}' + (f', exponent {exponent}' if exponent != 1 else '')
        return coxplane.build_figure(points, edge_list, canvas, title)

    def _checks(self) -> list[tuple[str, Callable[[], CheckResult]]]:
        tol = self.tolerance
        rs, hr, kd, op = self.root_system, self.highest, self.killing, self.operator

        def root_count():
            return CheckResult(name='root count = rank * h', passed=len(rs.roots) == rs.rank * self.h,
                               value=len(rs.roots), limit=rs.rank * self.h)

        def coxeter_number():
            ok = self.h == 1 + sum(hr.marks) and rootsystem.height(hr.psi) == self.h - 1
            return CheckResult(name='h = 1 + sum of marks, height(psi) = h - 1', passed=ok,
                               value=self.h, limit=1 + sum(hr.marks))

        def killing_scale():
            return CheckResult(name='Killing scale I = 2 h_dual', passed=kd.scale == 2 * kd.dual_coxeter,
                               value=str(kd.scale), limit=2 * kd.dual_coxeter)

        def self_adjoint():
            km = kd.gram @ op.matrix_m
            return CheckResult(name='K M symmetric (exact)', passed=bool((km == km.T).all()))

        def trace_identity():
            expected = rs.norm(hr.psi) / kd.scale + sum(
                (n * rs.base_form[i][i] / kd.scale for i, n in enumerate(hr.marks)), Fraction(0))
            return CheckResult(name='trace A = sum n_j (alpha_j, alpha_j)', passed=op.trace == expected,
                               value=str(op.trace), limit=str(expected))

        def eigenvalue_sum():
            total = sum(self.radii.eigenvalues)
            expected = 2 / self.h * float(op.trace)
            rel = abs(total - expected) / expected
            return CheckResult(name='sum of eigenvalues = (2/h) trace A', passed=rel <= tol,
                               value=rel, limit=tol)

        def charpoly_residual():
            worst = max(kostant.char_poly_residuals(self.charpoly, self.radii))
            return CheckResult(name='char poly vanishes on eigenvalues', passed=worst <= tol,
                               value=worst, limit=tol)

        def pairing():
            sc = self.structure
            return CheckResult(name='kappa(e_phi, e_-phi) = 1 (exact)',
                               passed=all(p == 1 for p in sc.pairing), value=len(sc.pairing))

        def commutator():
            defect = apposition.commutator_defect(self.structure, self.cyclic)
            return CheckResult(name='[x, x_minus] = 0', passed=defect <= 1e-12, value=defect, limit=1e-12)

        def regular():
            reg = apposition.regularity(self.structure, self.cyclic)
            return CheckResult(name='dim ker ad x = rank, ker = ker^2', passed=reg.is_regular,
                               value=f'{reg.kernel_dim}/{reg.dim - reg.rank_x2}', limit=rs.rank)

        def eigen_count():
            sr = self.spectral
            ok = sr.kernel_dim == rs.rank and len(sr.nonzero_eigs) == rs.rank * self.h
            return CheckResult(name='nonzero eigenvalue count = rank * h', passed=ok,
                               value=len(sr.nonzero_eigs), limit=rs.rank * self.h)

        def multiplicities():
            counts = [c.multiplicity for c in self.spectral.modulus_classes]
            return CheckResult(name='class multiplicities divisible by h',
                               passed=all(m % self.h == 0 for m in counts), value=str(counts))

        def rotation():
            defect = apposition.rotation_defect(self.spectral.nonzero_eigs, self.h)
            return CheckResult(name='spectrum invariant under gamma', passed=defect <= 1e-9,
                               value=defect, limit=1e-9)

        def compact():
            defect = apposition.compact_defect(self.structure, self.cyclic)
            return CheckResult(name='x - x_minus in the compact form', passed=defect <= tol,
                               value=defect, limit=tol)

        def modulus_path():
            direct = apposition.modulus_spectrum(self.structure, self.cyclic)
            joint = np.sort(np.abs(self.spectral.nonzero_eigs) ** 2)
            rel = float(np.max(np.abs(direct - joint) / joint)) if len(direct) == len(joint) else math.inf
            return CheckResult(name='eig ad(x) ad(x_minus) = |nu|^2', passed=rel <= tol,
                               value=rel, limit=tol)

        def oracle():
            worst = max(r for _, _, r in self.oracle_comparison())
            return CheckResult(name='oracle equivalence', passed=worst <= tol, value=worst, limit=tol)

        def z_vectors():
            sc, ce, sr = self.structure, self.cyclic, self.spectral
            worst = max(apposition.zero_component_eigencheck(
                sc, ce, sr.eigenvectors[:, cls.members[0]], sr.nonzero_eigs[cls.members[0]], op)
                for cls in sr.modulus_classes)
            return CheckResult(name='A z = |nu|^2 z', passed=worst <= tol, value=worst, limit=tol)

        def z_rank():
            rank = apposition.z_rank(self.structure, self.spectral)
            return CheckResult(name='one z per gamma-orbit spans h', passed=rank == rs.rank,
                               value=rank, limit=rs.rank)

        def reconstruction():
            sc, ce, sr = self.structure, self.cyclic, self.spectral
            worst, drift = 0.0, 0.0
            for cls in sr.modulus_classes:
                k = cls.members[0]
                gv = apposition.reconstruct_root_vector(sc, ce, sr.eigenvectors[sc.cartan_slice, k],
                                                        sr.nonzero_eigs[k], op=op, dps=self.mp_dps)
                worst = max(worst, gv.residual)
                drift = max(drift, gv.purification)
            return CheckResult(name='graded reconstruction', passed=worst <= 1e-9 and drift <= tol,
                               value=worst, limit=1e-9, detail=f'z off its A-eigenspace by {drift:.2e}')

        checks = [root_count, coxeter_number, killing_scale, self_adjoint, trace_identity,
                  eigenvalue_sum, charpoly_residual, pairing, commutator, regular, eigen_count,
                  multiplicities, rotation, compact, modulus_path, oracle, z_vectors, z_rank,
                  reconstruction]

        if self.is_e8:
            def e8_classes():
                counts = [c.multiplicity for c in self.spectral.modulus_classes]
                return CheckResult(name='E8: 8 classes of 30', passed=counts == [30] * 8, value=str(counts))

            def e8_golden():
                worst = max(m.residual for m in self.golden())
                return CheckResult(name='E8: golden pairs', passed=worst <= 1e-9, value=worst, limit=1e-9)

            def e8_table():
                worst = max(abs(v - t) for v, t in zip(self.radii.normalized, kostant.table_labels(self.radii)))
                return CheckResult(name='E8: normalized radii within 1 of the quoted list',
                                   passed=worst < 1, value=worst, limit=1)

            checks += [e8_classes, e8_golden, e8_table]
        return [(c.__name__, c) for c in checks]

    def run_checks(self) -> list[CheckResult]:
        results = []
        for key, check in self._checks():
            try:
                result = check()
            except VerificationError as e:
                logger.warning(f'{self.lie_type}: check {key} raised {type(e).__name__}: {e}')
                result = CheckResult(name=key, passed=False, detail=str(e))
            if not result.passed:
                logger.warning(f'{self.lie_type}: check "{result.name}" failed, value {result.value}')
            results.append(result)
        return results

    def verify(self) -> VerifyOutcome:
        start = time.perf_counter()
        checks = self.run_checks()
        try:
            comparison = self.oracle_comparison()
        except VerificationError:
            comparison = []
        discrepancy = max((r for _, _, r in comparison), default=math.inf)
        seconds = time.perf_counter() - start
        logger.info(f'{self.lie_type}: verified in {seconds:.2f}s, max discrepancy {discrepancy:.2e}')
        return VerifyOutcome(lie_type=self.lie_type, discrepancy=discrepancy, comparison=comparison,
                             checks=checks, seconds=seconds)
