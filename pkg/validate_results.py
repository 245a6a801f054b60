"""
efcap Result Validation
Checks every _result.json record and commented CSV table in an output directory
"""

import sys
import logging
import argparse
from pathlib import Path
from typing import Dict, List, Optional

from rich.console import Console

from core.result_schema import TABLE_COLUMNS, ResultValidator, read_csv

logger = logging.getLogger(__name__)


class OutputValidator:
    """Validates an efcap output directory for schema consistency"""

    def __init__(self):
        self.errors: List[str] = []
        self.warnings: List[str] = []
        self.records = ResultValidator()

    def validate_table(self, csv_file: Path) -> bool:
        try:
            header, frame = read_csv(str(csv_file))
        except Exception as e:
            self.errors.append(f"Unreadable table {csv_file}: {e}")
            return False

        kind = header.get("kind")
        if kind not in TABLE_COLUMNS:
            self.errors.append(f"{csv_file}: unknown table kind {kind!r}")
            return False
        if list(frame.columns) != TABLE_COLUMNS[kind]:
            self.errors.append(f"{csv_file}: columns {list(frame.columns)} do not match {kind}")
            return False
        if frame.empty:
            self.warnings.append(f"{csv_file}: no rows")
        return True

    def validate_directory(self, out_dir: str) -> bool:
        root = Path(out_dir)
        if not root.is_dir():
            self.errors.append(f"Output directory not found: {out_dir}")
            return False

        summary = self.records.validate_directory(out_dir)
        for entry in summary["errors"]:
            for error in entry["errors"]:
                self.errors.append(f"{entry['file']}: {error}")

        tables = sorted(root.rglob("*.csv"))
        tables_valid = all([self.validate_table(path) for path in tables])
        logger.info(f"Checked {summary['total_files']} records and {len(tables)} tables in {root}")
        return summary["invalid_files"] == 0 and tables_valid

    def summary(self) -> Dict[str, List[str]]:
        return {"errors": list(self.errors), "warnings": list(self.warnings)}

    def print_results(self, console: Console) -> None:
        for error in self.errors:
            console.print(f"[red]error[/red] {error}")
        for warning in self.warnings:
            console.print(f"[yellow]warning[/yellow] {warning}")
        if not self.errors:
            console.print(f"[green]All outputs valid[/green] ({len(self.warnings)} warnings)")
        else:
            console.print(f"[red]Validation failed with {len(self.errors)} errors[/red]")


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Validate an efcap output directory")
    parser.add_argument("out_dir", help="Directory written by an efcap command")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    validator = OutputValidator()
    success = validator.validate_directory(args.out_dir)
    validator.print_results(Console(stderr=True))
    return 0 if success else 1


if __name__ == "__main__":
    sys.exit(main())
