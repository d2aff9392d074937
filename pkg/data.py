import csv
import io
import json
import sys
import models
from pathlib import Path
from typing import TextIO
from rich.console import Console
from rich.table import Table
from loguru import logger

CONSOLE_WIDTH = 110

class BaseReportWriter:
    """Base class for all report writers.

    Subclasses implement `_write` and set `format`.
    """

    format: models.OutputFormat

    def __init__(self, stream: TextIO):
        self.stream = stream

    def write(self, tables: list[models.ReportTable]) -> None:
        self._write(tables)

    def _write(self, tables: list[models.ReportTable]) -> None:
        raise NotImplementedError("Subclasses must implement _write()")

class TextWriter(BaseReportWriter):
    """Fixed-width rich tables; no color so output is byte-stable."""

    format = models.OutputFormat.TEXT

    def _write(self, tables: list[models.ReportTable]) -> None:
        console = Console(file=self.stream, width=CONSOLE_WIDTH, color_system=None,
                          force_terminal=False, highlight=False, emoji=False)
        for table in tables:
            grid = Table(title=table.title, title_justify='left')
            for column in table.columns:
                grid.add_column(column, justify='right' if column not in ('check', 'detail') else 'left')
            for row in table.rows:
                grid.add_row(*(_text_cell(v) for v in row))
            console.print(grid)
            for note in table.notes:
                console.print(note)
            console.print()

class CsvWriter(BaseReportWriter):
    """One CSV block per table, separated by a blank line."""

    format = models.OutputFormat.CSV

    def _write(self, tables: list[models.ReportTable]) -> None:
        writer = csv.writer(self.stream, lineterminator='\n')
        for k, table in enumerate(tables):
            if k:
                self.stream.write('\n')
            writer.writerow(table.columns)
            writer.writerows([[_text_cell(v) for v in row] for row in table.rows])

class JsonWriter(BaseReportWriter):
    """Tables keyed by snake_case name, rows as records."""

    format = models.OutputFormat.JSON

    def _write(self, tables: list[models.ReportTable]) -> None:
        payload = {t.key: {'title': t.title, 'rows': t.records(), 'notes': t.notes} for t in tables}
        self.stream.write(json.dumps(payload, indent=2, default=str) + '\n')

WRITERS = {w.format: w for w in BaseReportWriter.__subclasses__()}

def _text_cell(value) -> str:
    match value:
        case bool():
            return 'pass' if value else 'FAIL'
        case float():
            return f'{value:.12g}'
        case None:
            return '-'
        case _:
            return str(value)

def render_report(tables: list[models.ReportTable], fmt: models.OutputFormat) -> str:
    buffer = io.StringIO()
    WRITERS[models.OutputFormat(fmt)](buffer).write(tables)
    return buffer.getvalue()

def write_report(tables: list[models.ReportTable], fmt: models.OutputFormat,
                 path: Path | None = None) -> None:
    text = render_report(tables, fmt)
    if path is None:
        sys.stdout.write(text)
        return
    path = Path(path)
    path.parent.mkdir(exist_ok=True, parents=True)
    with path.open('w', encoding='utf-8', newline='') as f:
        f.write(text)
    logger.info(f'{fmt} report written to {path}')
