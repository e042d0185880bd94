"""
Canonical instance file format.

Line 1 holds n and the initial-setup flag; the next six lines hold n values
each for release, processing, due, deadline, revenue and tardiness weight;
then n+1 setup rows of n+1 values, row 0 being the machine start.
"""
import os
import re

import numpy as np

from config import settings
from processors.schedule import Instance, Order
from utils.errors import InputError, ParseError
from utils.file_utils import ensure_directory, get_base_filename
from utils.format_utils import format_value

ATTRIBUTE_ROWS = ("release", "processing", "due", "deadline", "revenue", "weight")

LABEL_PATTERN = re.compile(
    r"^(?P<family>[a-z]+)-n(?P<n>\d+)-tau(?P<tau>[\d.]+)-[Rr](?P<R>[\d.]+)"
    r"(?:-q(?P<q>[\d.]+))?(?:-c(?P<c>[\d.]+))?(?:-s(?P<seed>\d+))?-i(?P<replicate>\d+)$"
)


def parse_label(label):
    """Generator metadata recovered from a label, or {} for other names"""
    match = LABEL_PATTERN.match(label)
    if not match or match.group("family") not in settings.FAMILIES:
        return {}
    metadata = {
        "family": match.group("family"),
        "n": int(match.group("n")),
        "tau": float(match.group("tau")),
        "R": float(match.group("R")),
        "seed": int(match.group("seed") or 0),
        "replicate": int(match.group("replicate")),
    }
    for key in ("q", "c"):
        if match.group(key) is not None:
            metadata[key] = float(match.group(key))
    return metadata


def _numbers(text, path, line_number, expected):
    fields = text.split()
    if len(fields) != expected:
        raise ParseError(f"expected {expected} values, found {len(fields)}", path, line_number)
    try:
        return [float(value) for value in fields]
    except ValueError as e:
        raise ParseError(f"non-numeric value ({e})", path, line_number)


def parse_instance(text, path=None, label=None):
    lines = text.split("\n")
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError("empty instance file", path, 1)

    header = lines[0].split()
    if len(header) != 2:
        raise ParseError("header must be 'n initial_setup'", path, 1)
    try:
        n = int(header[0])
        flag = int(header[1])
    except ValueError:
        raise ParseError("header values must be integers", path, 1)
    if n < 1:
        raise ParseError(f"instances need at least one order, got n={n}", path, 1)
    if flag not in (0, 1):
        raise ParseError(f"initial_setup flag must be 0 or 1, got {flag}", path, 1)

    if len(lines) < 1 + len(ATTRIBUTE_ROWS):
        raise ParseError(f"missing order attribute rows (expected {len(ATTRIBUTE_ROWS)})",
                         path, len(lines) + 1)
    columns = {
        name: _numbers(lines[k], path, k + 1, n)
        for k, name in enumerate(ATTRIBUTE_ROWS, start=1)
    }

    setup_lines = lines[1 + len(ATTRIBUTE_ROWS):]
    if len(setup_lines) != n + 1:
        line_number = len(lines) + 1 if len(setup_lines) < n + 1 else len(lines)
        raise ParseError(f"expected {n + 1} setup rows, found {len(setup_lines)}", path, line_number)
    setup = np.array([
        _numbers(row, path, 1 + len(ATTRIBUTE_ROWS) + k + 1, n + 1)
        for k, row in enumerate(setup_lines)
    ])

    orders = []
    for i in range(n):
        values = {name: columns[name][i] for name in ATTRIBUTE_ROWS}
        try:
            order = Order(id=i + 1, **values)
        except InputError as e:
            raise ParseError(str(e), path, 2)
        if not order.schedulable:
            print(f"⚠️ Order {order.id} cannot finish inside its window (b + t > e); it will never be scheduled")
        orders.append(order)

    label = label or "instance"
    metadata = parse_label(label)
    if path is not None:
        metadata["path"] = str(path)
    try:
        return Instance(orders=tuple(orders), setup=setup, initial_setup_enabled=bool(flag),
                        label=label, metadata=metadata)
    except InputError as e:
        raise ParseError(str(e), path)


def read_instance(path):
    """Load an instance file; the label is the file name without extension"""
    if not os.path.exists(path):
        raise InputError(f"Instance file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return parse_instance(text, path=path, label=get_base_filename(path))


def format_instance(instance):
    lines = [f"{instance.n} {1 if instance.initial_setup_enabled else 0}"]
    for name in ATTRIBUTE_ROWS:
        lines.append(" ".join(format_value(getattr(order, name)) for order in instance.orders))
    for row in instance.setup:
        lines.append(" ".join(format_value(value) for value in row))
    return "\n".join(lines) + "\n"


def write_instance(instance, path):
    """Write the canonical text form (UTF-8, LF line endings)"""
    directory = os.path.dirname(path)
    if directory:
        ensure_directory(directory)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(format_instance(instance))
    return path
