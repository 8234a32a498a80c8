"""
Chiral Dicke lab - Dataset writers

CSV: `# schema=<task> version=1 key=value ...` header, column names, one row
per grid point, floats with 17 significant digits. JSON carries the same
content as {schema, version, meta, columns, rows}. Both are byte-identical
for identical inputs.
"""

import csv
import io
import json
import math

from .constants import CSV_FLOAT_FORMAT, SCHEMA_VERSION


def format_value(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return CSV_FLOAT_FORMAT.format(value)
    if isinstance(value, (tuple, list)):
        return ",".join(format_value(item) for item in value)
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (tuple, list)):
        return [_json_value(item) for item in value]
    if isinstance(value, dict):
        return {key: _json_value(item) for key, item in value.items()}
    return value


def header_line(task, meta):
    parts = [f"schema={task}", f"version={SCHEMA_VERSION}"]
    parts += [f"{key}={format_value(value).replace(' ', '')}" for key, value in meta.items()]
    return "# " + " ".join(parts)


def render_csv(result):
    buffer = io.StringIO()
    buffer.write(header_line(result.task, result.meta) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([format_value(row.get(column)) for column in result.columns])
    return buffer.getvalue()


def render_json(result):
    document = {
        "schema": result.task,
        "version": SCHEMA_VERSION,
        "meta": _json_value(result.meta),
        "columns": list(result.columns),
        "rows": [[_json_value(row.get(column)) for column in result.columns] for row in result.rows],
    }
    return json.dumps(document, indent=1) + "\n"


RENDERERS = {
    "csv": render_csv,
    "json": render_json,
}


def write_result(result, path=None, fmt="csv", stream=None):
    """Render a SweepResult and write it to path, or to stream when no path is given"""
    text = RENDERERS[fmt](result)
    if path is None:
        stream.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    return text
