"""
Line-delimited structured text for reports.

One `key<TAB>value` line per field, in the model's declared field order, with
each value as compact JSON. Parsing and re-serializing is byte-identical.
"""

import json
from typing import Any, Dict, List, Sequence

from loguru import logger
from pydantic import BaseModel, ValidationError

from catp.config import REPORT_SCHEMA
from catp.domain.reports import REPORT_TYPES, AnyReport
from catp.exceptions import FormatError, InvalidInputError


def _encode(value: Any) -> str:
    return json.dumps(value, separators=(",", ":"), ensure_ascii=True, allow_nan=False)


def dump_report(report: BaseModel) -> str:
    """Serialize a report model to its text form, newline terminated."""
    fields = report.model_dump(mode="json", by_alias=True)
    return "".join(f"{key}\t{_encode(value)}\n" for key, value in fields.items())


def dump_reports(reports: Sequence[BaseModel]) -> str:
    """Several reports, one blank line between consecutive reports."""
    return "\n".join(dump_report(report) for report in reports)


def load_report(text: str) -> AnyReport:
    """Parse the text form back into the report model named by its type line."""
    fields: Dict[str, Any] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        if not line:
            continue
        key, sep, raw = line.partition("\t")
        if not sep:
            raise FormatError(f"Report line {number} has no tab separator")
        if key in fields:
            raise FormatError(f"Report line {number} repeats field {key}; split reports first")
        try:
            fields[key] = json.loads(raw)
        except json.JSONDecodeError as e:
            raise FormatError(f"Report line {number} ({key}) is not valid JSON: {e}") from e

    if fields.get("schema") != REPORT_SCHEMA:
        raise FormatError(f"Unknown report schema {fields.get('schema')!r}")
    report_cls = REPORT_TYPES.get(fields.get("type", ""))
    if report_cls is None:
        raise FormatError(f"Unknown report type {fields.get('type')!r}")
    try:
        return report_cls.model_validate(fields)
    except (ValidationError, InvalidInputError) as e:
        logger.error(f"Report failed validation: {e}")
        raise FormatError(f"Invalid {fields['type']} report: {e}") from e


def load_reports(text: str) -> List[AnyReport]:
    """Parse a blank-line separated stream of reports."""
    blocks = [block for block in text.split("\n\n") if block.strip()]
    if not blocks:
        raise FormatError("No report found")
    return [load_report(block) for block in blocks]
