import argparse
import asyncio
import os
import sys
import models
from pathlib import Path
from config_loader import load_app_config
from data import write_report
from pipeline import GossetPipeline, VerifyOutcome
from lie import kostant
from lie.coxplane import EdgeMode, emit_csv, emit_svg
from lie.utils import GossetUsageError, VerificationError
from loguru import logger

LOG_LEVELS = ["TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"]
LOG_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} - {message}"

def configure_logging(level: str, file: str = '') -> None:
    logger.remove()
    logger.add(sys.stderr, level=level)
    if file:
        logger.add(
            file,
            rotation="00:00",
            retention="30 days",
            compression="zip",
            level="DEBUG",
            enqueue=True,
            format=LOG_FORMAT,
        )

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--tolerance', type=float, default=None,
                        help=f'relative tolerance (default: ${models.TOLERANCE_ENV} or config)')
    common.add_argument('--format', dest='output_format', default='text',
                        choices=[f.value for f in models.OutputFormat])
    common.add_argument('--out', dest='output_path', type=Path, default=None)
    common.add_argument('--edges', dest='edge_mode', default='none', choices=[m.value for m in EdgeMode])
    common.add_argument('--seed', type=int, default=None)
    common.add_argument('--exponent', type=int, default=1,
                        help='Coxeter plane for gamma^m, m prime to h (project only)')
    common.add_argument('--log-level', default=None, type=str.upper, choices=LOG_LEVELS)
    common.add_argument('--config', type=Path, default=Path('config.toml'))

    parser = argparse.ArgumentParser(prog='gosset', description='Gosset circles of the simple Lie algebras')
    commands = parser.add_subparsers(dest='command', required=True)
    for command, text in [(models.Command.RADII, 'radii of the circles from the operator A'),
                          (models.Command.PROJECT, 'Coxeter-plane figure as SVG or CSV'),
                          (models.Command.CHARPOLY, 'exact characteristic polynomial of cA'),
                          (models.Command.MASSES, 'E8 radii and golden-ratio pairing')]:
        sub = commands.add_parser(command.value, parents=[common], help=text)
        sub.add_argument('lie_type', metavar='TYPE', help='e.g. E8, A3, G2')

    verify = commands.add_parser(models.Command.VERIFY.value, parents=[common],
                                 help='cross-check A against the adjoint spectrum')
    verify.add_argument('lie_type', metavar='TYPE', nargs='?', default=None)
    verify.add_argument('--all', dest='all_types', action='store_true',
                        help='every type of rank 2..8')
    return parser

def resolve_tolerance(flag: float | None, app: models.AppConfig) -> float:
    """CLI flag, then GOSSET_TOLERANCE, then the config file."""
    if flag is not None:
        return flag
    if env := os.environ.get(models.TOLERANCE_ENV):
        try:
            return float(env)
        except ValueError:
            raise GossetUsageError(f'{models.TOLERANCE_ENV}="{env}" is not a number') from None
    return app.numerics.tolerance

def run_config(args: argparse.Namespace, app: models.AppConfig) -> models.RunConfig:
    if getattr(args, 'all_types', False) and args.lie_type:
        raise GossetUsageError('give either a TYPE or --all, not both')
    return models.RunConfig(
        command=args.command,
        lie_type=args.lie_type,
        tolerance=resolve_tolerance(args.tolerance, app),
        output_format=args.output_format,
        output_path=args.output_path,
        edge_mode=args.edge_mode,
        seed=app.numerics.seed if args.seed is None else args.seed,
        exponent=args.exponent,
        all_types=getattr(args, 'all_types', False),
        jacobi_sample=app.numerics.jacobi_sample,
        mp_dps=app.numerics.mp_dps,
    )

def pipeline_for(cfg: models.RunConfig, lie_type=None) -> GossetPipeline:
    return GossetPipeline(lie_type or cfg.lie_type, tolerance=cfg.tolerance, seed=cfg.seed,
                          jacobi_sample=cfg.jacobi_sample, mp_dps=cfg.mp_dps)

def cmd_radii(cfg: models.RunConfig, app: models.AppConfig) -> int:
    p = pipeline_for(cfg)
    report = p.radii
    try:
        cp = p.charpoly
    except kostant.CharPolyError as e:
        logger.warning(f'{cfg.lie_type}: no exact eigenvalues, {e}')
        cp = None

    columns = ['i', 'eigenvalue_A', 'radius', 'normalized', 'integer_part']
    if p.is_e8:
        columns += ['table', 'family']
    rows = []
    for i in range(len(report.radii)):
        exact = kostant.exact_eigenvalue(cp, report.a_eigenvalues[i]) if cp else None
        row = [i + 1, str(exact) if exact is not None else 'irrational', report.radii[i],
               report.normalized[i], report.integer_parts[i]]
        if p.is_e8:
            row += [p.labels[i], f'F{p.families[i]}']
        rows.append(row)

    notes = [f'h = {p.h}, radii are square roots of the eigenvalues of (2/h) A']
    if p.is_e8:
        notes.append('table: the quoted E8 list, each entry within 1 of the normalized radius')
        notes.append('family: quartic factor of det(xI - cA) the radius belongs to '
                     '(the two types of Gosset circles)')
    table = models.ReportTable(key='radii', title=f'{cfg.lie_type} radii', columns=columns,
                               rows=rows, notes=notes)
    write_report([table], cfg.output_format, cfg.output_path)
    return models.ExitCode.OK

def cmd_charpoly(cfg: models.RunConfig, app: models.AppConfig) -> int:
    p = pipeline_for(cfg)
    cp = p.charpoly
    degree = len(cp.coefficients) - 1
    columns = [f'x^{degree - k}' for k in range(degree + 1)]
    rows = [['det(xI - cA)', *cp.coefficients]]
    # factors are right-aligned so each coefficient sits under its power of x
    rows += [[f'F{k + 1}', *[None] * (degree + 1 - len(f)), *f] for k, f in enumerate(cp.factors)]
    notes = [f'c = {cp.scale_c}']
    if cp.factors:
        notes.append('verified: det(xI - cA) = F1(x) F2(x) by exact multiplication')
    table = models.ReportTable(key='charpoly', title=f'{cfg.lie_type} characteristic polynomial',
                               columns=['polynomial', *columns], rows=rows, notes=notes)
    write_report([table], cfg.output_format, cfg.output_path)
    return models.ExitCode.OK

def cmd_masses(cfg: models.RunConfig, app: models.AppConfig) -> int:
    p = pipeline_for(cfg)
    if not p.is_e8:
        raise GossetUsageError(f'masses is defined for E8 only, not {cfg.lie_type}')
    report, labels = p.radii, p.labels
    radii = models.ReportTable(
        key='radii', title='E8 normalized radii',
        columns=['i', 'normalized', 'integer_part', 'table', 'family'],
        rows=[[i + 1, report.normalized[i], report.integer_parts[i], labels[i], f'F{p.families[i]}']
              for i in range(len(report.radii))])
    pairs = models.ReportTable(
        key='golden_pairs', title='Golden-ratio pairing, R = (1 + sqrt 5)/2',
        columns=['F1_radius', 'F2_radius', 'relation', 'residual'],
        rows=[[labels[m.f1_index], labels[m.f2_index], str(m.relation), m.residual]
              for m in p.golden()],
        notes=['radii are labelled by the quoted E8 list',
               'residuals are |ratio - R| on unrounded radii'])
    write_report([radii, pairs], cfg.output_format, cfg.output_path)
    return models.ExitCode.OK

def cmd_project(cfg: models.RunConfig, app: models.AppConfig) -> int:
    if cfg.output_path is None:
        raise GossetUsageError('project needs --out')
    p = pipeline_for(cfg)
    fig = p.figure(cfg.edge_mode, cfg.exponent, app.render.canvas())
    if cfg.output_format is models.OutputFormat.CSV:
        emit_csv(list(fig.points), cfg.output_path)
        emit_svg(fig, cfg.output_path.with_suffix('.svg'))
    else:
        emit_svg(fig, cfg.output_path)
    return models.ExitCode.OK

def _verify_tables(outcome: VerifyOutcome) -> list[models.ReportTable]:
    key = str(outcome.lie_type).lower()
    comparison = models.ReportTable(
        key=f'{key}_comparison', title=f'{outcome.lie_type}: (2/h) A against the adjoint spectrum',
        columns=['i', 'kostant', 'oracle', 'relative_difference'],
        rows=[[i + 1, a, b, r] for i, (a, b, r) in enumerate(outcome.comparison)],
        notes=[f'max relative discrepancy {outcome.discrepancy:.3e}'])
    checks = models.ReportTable(
        key=f'{key}_checks', title=f'{outcome.lie_type}: invariant checks',
        columns=['check', 'result', 'value', 'limit', 'detail'],
        rows=[[c.name, c.passed, c.value, c.limit, c.detail] for c in outcome.checks],
        notes=[f'{"PASS" if outcome.passed else "FAIL"} {outcome.lie_type}'])
    return [comparison, checks]

async def verify_all(cfg: models.RunConfig) -> list[VerifyOutcome]:
    """Each type runs in a worker thread; results come back in sweep order."""
    async with asyncio.TaskGroup() as tg:
        tasks = [tg.create_task(asyncio.to_thread(pipeline_for(cfg, t).verify))
                 for t in cfg.lie_types]
    return [t.result() for t in tasks]

def cmd_verify(cfg: models.RunConfig, app: models.AppConfig) -> int:
    if cfg.all_types:
        outcomes = asyncio.run(verify_all(cfg))
    else:
        outcomes = [pipeline_for(cfg).verify()]

    tables = [t for o in outcomes for t in _verify_tables(o)]
    write_report(tables, cfg.output_format, cfg.output_path)
    for o in outcomes:
        for c in o.failures:
            logger.error(f'{o.lie_type}: {c.name} failed {c.detail}'.rstrip())
    logger.info(f'verified {len(outcomes)} types in {sum(o.seconds for o in outcomes):.2f}s of work')
    return models.ExitCode.OK if all(o.passed for o in outcomes) else models.ExitCode.VERIFICATION_FAILED

COMMANDS = {
    models.Command.RADII: cmd_radii,
    models.Command.VERIFY: cmd_verify,
    models.Command.PROJECT: cmd_project,
    models.Command.CHARPOLY: cmd_charpoly,
    models.Command.MASSES: cmd_masses,
}

def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        app = load_app_config(args.config)
    except (RuntimeError, FileNotFoundError) as e:
        configure_logging('ERROR')
        logger.error(str(e))
        return models.ExitCode.USAGE

    configure_logging(args.log_level or app.logging.level, app.logging.file)
    logger.debug(f'numerics: {app.numerics}')
    try:
        cfg = run_config(args, app)
        return COMMANDS[cfg.command](cfg, app)
    except GossetUsageError as e:
        logger.error(str(e))
        return models.ExitCode.USAGE
    except VerificationError as e:
        logger.error(f'{type(e).__name__}: {e}')
        return models.ExitCode.VERIFICATION_FAILED
    except OSError as e:
        logger.error(f'I/O error: {e}')
        return models.ExitCode.IO
    except Exception:
        logger.exception('Unexpected failure')
        return models.ExitCode.VERIFICATION_FAILED

if __name__ == "__main__":
    sys.exit(main())
