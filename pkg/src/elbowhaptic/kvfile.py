"""Flat ``dotted.key = value`` config files.

One assignment per line, ``#`` starts a comment. Values are double-quoted
strings, integers, floats, ``true``/``false``, or bracketed lists of those
(nesting allowed, as used by piecewise breakpoints).
"""

from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass
from typing import Any, Dict

from .errors import ConfigError

_KEY_RE = re.compile(r"^[a-z][a-z0-9_]*(\.[a-z][a-z0-9_]*)+$")


@dataclass(frozen=True)
class Entry:
    value: Any
    line: int


def _strip_comment(line: str) -> str:
    in_str = False
    for i, ch in enumerate(line):
        if ch == '"':
            in_str = not in_str
        elif ch == "#" and not in_str:
            return line[:i]
    return line


def _convert(node, line, key):
    if isinstance(node, bool) or node is None:
        raise ConfigError("use lowercase true/false for booleans", line=line, key=key)
    if isinstance(node, (int, float, str)):
        if isinstance(node, float) and not math.isfinite(node):
            raise ConfigError("non-finite number", line=line, key=key)
        return node
    if isinstance(node, list):
        return [_convert(v, line, key) for v in node]
    raise ConfigError(f"unsupported value type {type(node).__name__}", line=line, key=key)


def parse_value(text: str, line: int = None, key: str = None):
    text = text.strip()
    if text == "true":
        return True
    if text == "false":
        return False
    if not text:
        raise ConfigError("missing value", line=line, key=key)
    if text.startswith("'"):
        raise ConfigError("strings must use double quotes", line=line, key=key)
    try:
        node = ast.literal_eval(text)
    except (ValueError, SyntaxError) as exc:
        raise ConfigError(f"cannot parse value {text!r} ({exc.__class__.__name__})",
                          line=line, key=key) from None
    if isinstance(node, tuple):
        raise ConfigError("use [ ] for lists", line=line, key=key)
    return _convert(node, line, key)


def read_assignments(text: str) -> Dict[str, Entry]:
    """Parse config text into ``{key: Entry(value, line)}``.

    Raises ConfigError carrying the line number (and key when known) for
    syntax errors and duplicate keys.
    """
    out: Dict[str, Entry] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        if not _KEY_RE.match(key):
            raise ConfigError(f"malformed key {key!r}", line=lineno, key=key)
        if key in out:
            raise ConfigError(f"duplicate key (first set on line {out[key].line})",
                              line=lineno, key=key)
        out[key] = Entry(parse_value(value, lineno, key), lineno)
    return out


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        if '"' in value or "\n" in value:
            raise ValueError(f"cannot serialize string {value!r}")
        return f'"{value}"'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def format_assignments(items) -> str:
    return "".join(f"{k} = {format_value(v)}\n" for k, v in items)
