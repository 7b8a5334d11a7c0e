"""Line-oriented text format for multilayer networks.

Layout (``\\n`` line endings, sections in this order, each at most once)::

    #DIMENSIONS
    social,fb,tw            dimension name followed by its layers
    #ACTORS                 optional: actors with no node-layer
    zoe
    #NODES
    ann,fb,color="red"      actor, one layer per dimension, key=value pairs
    #EDGES
    ann,fb,bob,fb,weight=2.0

Lines starting with ``%`` are comments.  Numbers are written with the
shortest decimal that round-trips; strings are double-quoted.  Inside any
field the characters ``\\ , = " % #`` and line breaks are backslash-escaped.
The writer only emits non-empty sections (``#DIMENSIONS`` always).
"""

from __future__ import annotations

import io
import re
from typing import IO

from mlnstore import errors
from mlnstore.backends.canonical import CanonicalForm, snapshot_canonical
from mlnstore.model import MultilayerStore

SECTIONS = ("#DIMENSIONS", "#ACTORS", "#NODES", "#EDGES")

_ESCAPES = {"\\": "\\\\", ",": "\\,", "=": "\\=", '"': '\\"', "%": "\\%", "#": "\\#",
            "\n": "\\n", "\r": "\\r"}
_NEEDS_ESCAPE = re.compile(r'[\\,="%#\n\r]')
_UNESCAPE = re.compile(r"\\(.)", re.DOTALL)
_NUMBER = re.compile(r"[+-]?(?:(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?|inf|nan)")


def escape(text: str) -> str:
    if not _NEEDS_ESCAPE.search(text):
        return text
    return "".join(_ESCAPES.get(c, c) for c in text)


def unescape(raw: str) -> str:
    if "\\" not in raw:
        return raw
    return _UNESCAPE.sub(lambda m: {"n": "\n", "r": "\r"}.get(m.group(1), m.group(1)), raw)


def format_value(value) -> str:
    if isinstance(value, str):
        return f'"{escape(value)}"'
    return repr(float(value))


def _record(fields, attrs=()) -> str:
    parts = [escape(f) for f in fields]
    parts.extend(f"{escape(k)}={format_value(v)}" for k, v in attrs)
    return ",".join(parts)


def render(form: CanonicalForm) -> str:
    lines = ["#DIMENSIONS"]
    lines.extend(_record((name, *layers)) for name, layers in form.schema)
    placed = {nl.actor for nl, _ in form.nodes}
    isolated = [a for a in form.actors if a not in placed]
    if isolated:
        lines.append("#ACTORS")
        lines.extend(escape(a) for a in isolated)
    if form.nodes:
        lines.append("#NODES")
        lines.extend(_record((nl.actor, *nl.coord), attrs) for nl, attrs in form.nodes)
    if form.edges:
        lines.append("#EDGES")
        lines.extend(
            _record((u.actor, *u.coord, v.actor, *v.coord), attrs) for u, v, attrs in form.edges
        )
    return "\n".join(lines) + "\n"


def dumps(store: MultilayerStore) -> str:
    return render(snapshot_canonical(store))


def write_mln(store: MultilayerStore, sink: IO) -> None:
    """Write ``store`` in canonical order to a binary (or text) stream."""
    text = dumps(store)
    try:
        if isinstance(sink, io.TextIOBase):
            sink.write(text)
        else:
            sink.write(text.encode("utf-8"))
    except (OSError, ValueError) as e:
        raise errors.SinkFailure(f"could not write network: {e}") from e


def save(store: MultilayerStore, path) -> None:
    with open(path, "wb") as fh:
        write_mln(store, fh)


# -------------------------------------------------------------------- reading


def split_fields(line: str, lineno: int) -> list[str]:
    """Split on unescaped commas, keeping escapes in the returned raw fields."""
    if "\\" not in line:
        return line.split(",")
    fields, buf, i = [], [], 0
    while i < len(line):
        c = line[i]
        if c == "\\":
            if i + 1 == len(line):
                raise errors.ParseError("dangling escape at end of line", lineno)
            buf.append(line[i:i + 2])
            i += 2
            continue
        if c == ",":
            fields.append("".join(buf))
            buf = []
        else:
            buf.append(c)
        i += 1
    fields.append("".join(buf))
    return fields


def _find_unescaped(raw: str, ch: str) -> int:
    if "\\" not in raw:
        return raw.find(ch)
    i = 0
    while i < len(raw):
        if raw[i] == "\\":
            i += 2
            continue
        if raw[i] == ch:
            return i
        i += 1
    return -1


def _parse_value(raw: str, lineno: int):
    if raw.startswith('"'):
        inner = raw[1:-1]
        # closing quote must exist and not be escaped by an odd backslash run
        trailing = len(inner) - len(inner.rstrip("\\"))
        if len(raw) < 2 or not raw.endswith('"') or trailing % 2:
            raise errors.ParseError(f"unterminated string value {raw!r}", lineno)
        return unescape(inner)
    if not _NUMBER.fullmatch(raw):
        raise errors.ParseError(f"bad attribute value {raw!r}", lineno)
    return float(raw)


def _parse_record(line: str, lineno: int) -> tuple[list[str], dict]:
    positional: list[str] = []
    attrs: dict = {}
    for raw in split_fields(line, lineno):
        eq = _find_unescaped(raw, "=")
        if eq < 0:
            if attrs:
                raise errors.ParseError("positional field after attributes", lineno)
            positional.append(unescape(raw))
            continue
        key = unescape(raw[:eq])
        if not key:
            raise errors.ParseError("empty attribute key", lineno)
        if key in attrs:
            raise errors.DuplicateRecord(f"attribute {key!r} given twice", lineno)
        attrs[key] = _parse_value(raw[eq + 1:], lineno)
    return positional, attrs


def read_mln(source: IO, store: MultilayerStore) -> None:
    """Load a document into a blank store.

    On error the store may hold the records read before the failing line.
    """
    if not store.is_blank():
        raise errors.NonEmptyStore("read_mln needs a blank store")
    data = source.read()
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise errors.ParseError(f"not UTF-8: {e}", 1) from None
    loads(data, store)


def load(path, store: MultilayerStore) -> None:
    with open(path, "rb") as fh:
        read_mln(fh, store)


def loads(text: str, store: MultilayerStore) -> None:
    if not store.is_blank():
        raise errors.NonEmptyStore("loads needs a blank store")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    section = -1
    for lineno, line in enumerate(lines, start=1):
        if not line or line.startswith("%"):
            continue
        if line.startswith("#"):
            if line not in SECTIONS:
                raise errors.ParseError(f"unknown section {line!r}", lineno)
            idx = SECTIONS.index(line)
            if idx <= section:
                raise errors.ParseError(f"section {line} repeated or out of order", lineno)
            if section < 0 and idx != 0:
                raise errors.ParseError("document must start with #DIMENSIONS", lineno)
            section = idx
            continue
        if section < 0:
            raise errors.ParseError("record outside any section", lineno)
        positional, attrs = _parse_record(line, lineno)
        _apply(store, SECTIONS[section], positional, attrs, lineno)


def _apply(store: MultilayerStore, section: str, fields: list[str], attrs: dict, lineno: int):
    d = store.d
    try:
        if section == "#DIMENSIONS":
            if attrs or len(fields) < 2:
                raise errors.ParseError("dimension rows are 'name,layer[,layer...]'", lineno)
            if len(set(fields[1:])) != len(fields) - 1:
                raise errors.DuplicateRecord(f"repeated layer in dimension {fields[0]!r}", lineno)
            try:
                store.create_dimension(fields[0], fields[1])
            except errors.DuplicateDimension as e:
                raise errors.DuplicateRecord(str(e), lineno) from None
            for layer in fields[2:]:
                store.create_layer(fields[0], layer)
        elif section == "#ACTORS":
            if attrs or len(fields) != 1:
                raise errors.ParseError("actor rows hold exactly one name", lineno)
            if store.has_actor(fields[0]):
                raise errors.DuplicateRecord(f"actor {fields[0]!r} listed twice", lineno)
            store.add_actor(fields[0])
        elif section == "#NODES":
            if len(fields) != 1 + d:
                raise errors.ArityMismatch(
                    f"node row has {len(fields) - 1} coordinates, {d} dimensions declared", lineno
                )
            try:
                store.add_node(fields[0], fields[1:], attrs)
            except errors.DuplicateNode as e:
                raise errors.DuplicateRecord(str(e), lineno) from None
        else:
            if len(fields) != 2 + 2 * d:
                raise errors.ArityMismatch(
                    f"edge row has {len(fields)} positional fields, expected {2 + 2 * d}", lineno
                )
            a, ca, b, cb = fields[0], fields[1:1 + d], fields[1 + d], fields[2 + d:]
            try:
                store.add_edge(a, ca, b, cb, attrs)
            except errors.DuplicateEdge as e:
                raise errors.DuplicateRecord(str(e), lineno) from None
    except errors.ParseError:
        raise
    except errors.MLNError as e:
        raise errors.ParseError(f"{type(e).__name__}: {e}", lineno) from e
