"""
Chiral Dicke lab - Parameter files and key=value overrides

Parameter files are plain `key = value` files read with python-decouple's
RepositoryEnv; `--param key=value` flags go through the same parsers, so a
value means the same thing wherever it is written.
"""

import logging
import math
import re

from decouple import RepositoryEnv
from django.core.exceptions import ValidationError

from .constants import Side

logger = logging.getLogger(__name__)

# a, a*pi, a pi, pi/b, a*pi/b ...
ANGLE_PATTERN = re.compile(r"^\s*(?P<coef>[-+]?[0-9.eE+-]*?)\s*\*?\s*pi\s*(?:/\s*(?P<den>[0-9.eE+-]+))?\s*$")


def parse_number(text):
    """Float, optionally written as a multiple of pi (`pi/8`, `3*pi/8`, `0.5pi`)"""
    text = str(text).strip()
    match = ANGLE_PATTERN.match(text)
    if match:
        coef = match.group("coef")
        coef = float(coef) if coef not in ("", "+", "-") else (-1.0 if coef == "-" else 1.0)
        den = float(match.group("den")) if match.group("den") else 1.0
        return coef * math.pi / den
    return float(text)


def parse_int(text):
    value = float(str(text).strip())
    if not value.is_integer():
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


def parse_list(parser):
    def parse(text):
        items = [item for item in str(text).replace(";", ",").split(",") if item.strip()]
        if not items:
            raise ValueError("empty list")
        return tuple(parser(item) for item in items)
    return parse


def parse_window(text):
    window = parse_list(float)(text)
    if len(window) != 2:
        raise ValueError(f"window needs exactly two values, got {len(window)}")
    return window


def parse_side(text):
    return Side(str(text).strip()).value


def parse_axis_text(text):
    from .sweeps import parse_axis

    parse_axis(text)
    return str(text).strip()


PARSERS = {
    "omega_c": parse_number,
    "omega_z": parse_number,
    "g1": parse_number,
    "g2": parse_number,
    "g": parse_number,
    "phi": parse_number,
    "U": parse_number,
    "UN": parse_number,
    "N": parse_int,
    "axis1": parse_axis_text,
    "axis2": parse_axis_text,
    "phi_series": parse_list(parse_number),
    "omega_z_series": parse_list(parse_number),
    "n_list": parse_list(parse_int),
    "window": parse_window,
    "points": parse_int,
    "sides": parse_list(parse_side),
}


def parse_entries(entries, source="command line"):
    """Validate and convert a {key: text} mapping; raises ValidationError naming the offending key"""
    values = {}
    for key, text in entries.items():
        key = key.strip()
        if key not in PARSERS:
            raise ValidationError(
                f"{source}: unknown key {key!r} (expected one of {', '.join(sorted(PARSERS))})",
                code="unknown_key",
            )
        try:
            values[key] = PARSERS[key](text)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{source}: bad value for {key!r}: {text!r} ({exc})", code="invalid")
    return values


def parse_assignments(assignments):
    """['key=value', ...] from repeated --param flags"""
    entries = {}
    for assignment in assignments or ():
        if "=" not in assignment:
            raise ValidationError(f"--param expects key=value, got {assignment!r}", code="invalid")
        key, text = assignment.split("=", 1)
        entries[key.strip()] = text.strip()
    return parse_entries(entries, "--param")


def load_config(path):
    """Read a key = value parameter file; blank and # comment lines are ignored"""
    try:
        repository = RepositoryEnv(str(path))
    except OSError as exc:
        raise ValidationError(f"Cannot read config file {path}: {exc}", code="missing")
    values = parse_entries(dict(repository.data), f"config file {path}")
    logger.info(f"Loaded {len(values)} keys from {path}")
    return values
