"""
efcap Result Schema v1
Contract for _result.json files and the commented CSV tables every command writes
"""

import json
import math
import logging
from dataclasses import dataclass, asdict, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "v1"

COMMANDS = ["exponents", "shoot", "branch", "singular", "phase", "eigen", "bounds", "limit-p1", "verify"]

TABLE_COLUMNS = {
    "profile": ["x", "value", "derivative"],
    "branch": ["Gamma", "gamma", "Theta", "R", "slope_sign", "w_end"],
    "orbit": ["t", "y", "z", "J", "E"],
    "scan": ["N", "p", "Theta", "certified"],
    "p-trend": ["p", "Gamma"],
    "bessel": ["lambda", "product", "error"],
}


def round_floats(value: Any, digits: int) -> Any:
    """Copy of a plain structure with every float cut to ``digits`` significant digits"""
    if isinstance(value, dict):
        return {k: round_floats(v, digits) for k, v in value.items()}
    if isinstance(value, list):
        return [round_floats(v, digits) for v in value]
    if isinstance(value, float):
        return float(f"{value:.{digits}g}")
    return value


def to_plain(value: Any) -> Any:
    """JSON-safe copy: numpy scalars and arrays unwrapped, infinities as "inf"/"-inf", NaN as None"""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


@dataclass
class ResultRecordV1:
    """Result record, schema version 1"""
    schema_version: str = SCHEMA_VERSION
    command: str = ""
    git_sha: str = "unknown"
    config_hash: str = ""
    version: str = ""

    params: Dict[str, Any] = field(default_factory=dict)
    exponents: Dict[str, Any] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    schema_valid: bool = True
    validation_errors: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return to_plain(asdict(self))

    def to_json(self, digits: int = 17) -> str:
        # repr of a float round-trips, i.e. 17 significant digits at most
        data = self.to_dict()
        if digits < 17:
            data = round_floats(data, digits)
        return json.dumps(data, indent=2, sort_keys=True)

    def save_to_file(self, filepath: str, digits: int = 17) -> None:
        path = Path(filepath)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(digits) + "\n")
        logger.info(f"Wrote {path}")

    def validate_schema(self) -> bool:
        errors = []
        if self.schema_version != SCHEMA_VERSION:
            errors.append(f"Invalid schema version: {self.schema_version}")
        if self.command not in COMMANDS:
            errors.append(f"Invalid command: {self.command}")
        if not isinstance(self.config_hash, str) or len(self.config_hash) != 8:
            errors.append("config_hash must be an 8-character hex string")
        if self.params:
            N = self.params.get("N")
            if not isinstance(N, int) or isinstance(N, bool) or N < 3:
                errors.append("params.N must be an integer >= 3")
            # eigen and limit-p1 records carry N only
            if "p" in self.params:
                p = self.params["p"]
                if isinstance(p, bool) or not isinstance(p, (int, float)) or not p > 1:
                    errors.append("params.p must be a real > 1")
        if not isinstance(self.summary, dict):
            errors.append("summary must be an object")

        self.validation_errors = errors
        self.schema_valid = len(errors) == 0
        return self.schema_valid


class ResultValidator:
    """Validator for result records"""

    def __init__(self):
        self.supported_versions = [SCHEMA_VERSION]

    def validate_file(self, filepath: str) -> Tuple[bool, List[str]]:
        try:
            with open(filepath, "r") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            return False, [f"Invalid JSON: {e}"]
        except OSError as e:
            return False, [f"Unreadable file: {e}"]

        schema_version = data.get("schema_version", "unknown")
        if schema_version not in self.supported_versions:
            return False, [f"Unsupported schema version: {schema_version}"]
        try:
            record = ResultRecordV1(**data)
        except TypeError as e:
            return False, [f"Unexpected fields: {e}"]
        return record.validate_schema(), record.validation_errors

    def validate_directory(self, dirpath: str) -> Dict[str, Any]:
        results = {"valid_files": 0, "invalid_files": 0, "total_files": 0, "errors": []}
        for filepath in sorted(Path(dirpath).rglob("*_result.json")):
            results["total_files"] += 1
            is_valid, errors = self.validate_file(str(filepath))
            if is_valid:
                results["valid_files"] += 1
            else:
                results["invalid_files"] += 1
                results["errors"].append({"file": str(filepath), "errors": errors})
        return results


def write_csv(frame: pd.DataFrame, filepath: str, kind: str, header: Dict[str, Any], digits: int = 17) -> Path:
    """Write ``frame`` behind '# key=value' comment lines with ``digits`` significant digits"""
    if kind not in TABLE_COLUMNS:
        raise ValueError(f"unknown table kind {kind!r}")
    missing = [c for c in TABLE_COLUMNS[kind] if c not in frame.columns]
    if missing:
        raise ValueError(f"{kind} table lacks columns {missing}")
    path = Path(filepath)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# kind={kind}", f"# schema_version={SCHEMA_VERSION}"]
    lines += [f"# {key}={header[key]}" for key in sorted(header)]
    with open(path, "w", newline="") as f:
        f.write("\n".join(lines) + "\n")
        frame[TABLE_COLUMNS[kind]].to_csv(f, index=False, float_format=f"%.{digits}g", lineterminator="\n")
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def read_csv(filepath: str) -> Tuple[Dict[str, str], pd.DataFrame]:
    """Header mapping and table of a file written by write_csv"""
    header = {}
    with open(filepath, "r") as f:
        for line in f:
            if not line.startswith("# "):
                break
            key, _, value = line[2:].rstrip("\n").partition("=")
            header[key] = value
    return header, pd.read_csv(filepath, comment="#")


def create_result_v1(command: str, artifacts: Dict[str, Any], params: Optional[Dict[str, Any]] = None,
                     exponents: Optional[Dict[str, Any]] = None, summary: Optional[Dict[str, Any]] = None,
                     diagnostics: Optional[Dict[str, Any]] = None) -> ResultRecordV1:
    return ResultRecordV1(
        command=command,
        git_sha=artifacts.get("git_sha", "unknown"),
        config_hash=artifacts.get("config_hash", ""),
        version=artifacts.get("version", ""),
        params=to_plain(params or {}),
        exponents=to_plain(exponents or {}),
        summary=to_plain(summary or {}),
        diagnostics=to_plain(diagnostics or {}),
    )
