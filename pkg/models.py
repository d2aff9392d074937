from dataclasses import dataclass, field
from enum import IntEnum, StrEnum
from pathlib import Path
from typing import Any, Optional
from lie.coxplane import CanvasStyle, EdgeMode, DEFAULT_PALETTE
from lie.rootsystem import LieType
from lie.utils import GossetUsageError

DEFAULT_TOLERANCE = 1e-8
TOLERANCE_ENV = 'GOSSET_TOLERANCE'

# every admissible simple type of rank 2..8
SWEEP = (
    *(f'A{n}' for n in range(2, 9)),
    *(f'B{n}' for n in range(2, 9)),
    *(f'C{n}' for n in range(2, 9)),
    *(f'D{n}' for n in range(4, 9)),
    'E6', 'E7', 'E8', 'F4', 'G2',
)

class OutputFormat(StrEnum):
    TEXT = 'text'
    CSV = 'csv'
    JSON = 'json'

class Command(StrEnum):
    RADII = 'radii'
    VERIFY = 'verify'
    PROJECT = 'project'
    CHARPOLY = 'charpoly'
    MASSES = 'masses'

class ExitCode(IntEnum):
    OK = 0
    VERIFICATION_FAILED = 1
    USAGE = 2
    IO = 3

@dataclass
class NumericsConfig:
    """Numeric defaults; the tolerance can be overridden by GOSSET_TOLERANCE or --tolerance."""
    tolerance: float = DEFAULT_TOLERANCE
    seed: int = 0
    jacobi_sample: int = 500
    mp_dps: int = 50

@dataclass
class RenderConfig:
    size: int = 800
    margin: int = 40
    circle_stroke: float = 0.6
    edge_stroke: float = 0.25
    point_radius: float = 3.0
    palette: list[str] = field(default_factory=lambda: list(DEFAULT_PALETTE))

    def __post_init__(self):
        if self.size <= 2 * self.margin:
            raise ValueError(f'canvas size {self.size} leaves no room inside margin {self.margin}')
        if not self.palette:
            raise ValueError('palette must name at least one color')

    def canvas(self) -> CanvasStyle:
        return CanvasStyle(size=self.size, margin=self.margin, circle_stroke=self.circle_stroke,
                           edge_stroke=self.edge_stroke, point_radius=self.point_radius,
                           palette=tuple(self.palette))

@dataclass
class LoggingConfig:
    level: str = 'INFO'
    file: str = ''            # empty disables the file sink

@dataclass
class AppConfig:
    """Complete configuration as bound from TOML."""
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    render: RenderConfig = field(default_factory=RenderConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

@dataclass(kw_only=True)
class RunConfig:
    command: Command
    lie_type: Optional[LieType] = None
    tolerance: float = DEFAULT_TOLERANCE
    output_format: OutputFormat = OutputFormat.TEXT
    output_path: Optional[Path] = None
    edge_mode: EdgeMode = EdgeMode.NONE
    seed: int = 0
    exponent: int = 1
    all_types: bool = False
    jacobi_sample: int = 500
    mp_dps: int = 50

    def __post_init__(self):
        try:
            self.command = Command(self.command)
            self.output_format = OutputFormat(self.output_format)
            self.edge_mode = EdgeMode(self.edge_mode)
        except ValueError as e:
            raise GossetUsageError(str(e)) from None

        if isinstance(self.lie_type, str):
            self.lie_type = LieType.parse(self.lie_type)
        if self.lie_type is None and not self.all_types:
            raise GossetUsageError(f'{self.command} needs a Lie type such as "E8"')
        if not 0 < self.tolerance < 1e-2:
            raise GossetUsageError(f'tolerance {self.tolerance} must lie in (0, 1e-2)')
        if self.output_path is not None:
            self.output_path = Path(self.output_path)

    @property
    def lie_types(self) -> list[LieType]:
        if self.all_types:
            return [LieType.parse(t) for t in SWEEP]
        return [self.lie_type]

@dataclass(kw_only=True)
class ReportTable:
    """One block of command output; rendered as a rich table, CSV block or JSON list."""
    key: str
    title: str
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def records(self) -> list[dict[str, Any]]:
        return [dict(zip(self.columns, row)) for row in self.rows]
