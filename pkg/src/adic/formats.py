"""Line-oriented text formats: module presentations, element lists, adic systems.

Blank lines and ``#`` comments are ignored everywhere.
"""

from __future__ import annotations

from pathlib import Path

from .coeffs import QQ, Field, GF
from .ideals import ALL_VARIABLES, AdicIdeal, parse_ideal
from .lift import AdicSystem
from .parsing import ParseError, parse_polynomial
from .polyring import Vector
from .truncate import ModulePresentation


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line


def parse_field(text: str) -> Field:
    parts = text.split()
    if parts == ["Q"]:
        return QQ
    if len(parts) == 2 and parts[0] == "Fp" and parts[1].isdigit():
        return GF(int(parts[1]))
    raise ValueError(f"field must be 'Q' or 'Fp <p>', got {text!r}")


def parse_vector(text: str, field: Field, rank: int | None = None) -> Vector:
    """Comma separated polynomials."""
    entries = tuple(parse_polynomial(e, field) for e in text.split(","))
    if rank is not None and len(entries) != rank:
        raise ValueError(f"expected {rank} entries, got {len(entries)}")
    return entries


def _presentation(items, field: Field, ideal: AdicIdeal | None) -> ModulePresentation:
    rank = None
    rels = []
    for n, key, value in items:
        try:
            if key == "field":
                field = parse_field(value)
            elif key == "ideal":
                ideal = parse_ideal(value, field)
            elif key == "gens":
                if not value.isdigit():
                    raise ValueError("gens: expects the number of generators")
                rank = int(value)
            elif key == "rel":
                if rank is None:
                    raise ValueError("rel: before gens:")
                rels.append(parse_vector(value, field, rank))
            else:
                raise ValueError(f"unknown key {key!r}")
        except ParseError as err:
            raise FormatError(f"{key}: {err}", n) from None
        except ValueError as err:
            raise FormatError(str(err), n) from None
    if rank is None:
        raise FormatError("missing gens: line")
    return ModulePresentation(rank, tuple(rels), ideal if ideal is not None else ALL_VARIABLES, field)


def _split(n: int, line: str):
    key, sep, value = line.partition(":")
    if not sep:
        raise FormatError(f"expected 'key: value', got {line!r}", n)
    return n, key.strip(), value.strip()


def parse_module(text: str) -> ModulePresentation:
    return _presentation([_split(n, line) for n, line in _lines(text)], QQ, None)


def format_module(M: ModulePresentation) -> str:
    out = [f"field: {M.field.describe()}", f"ideal: {M.ideal.describe()}", f"gens: {M.rank}"]
    out += ["rel: " + ", ".join(str(p) for p in r) for r in M.relations]
    return "\n".join(out) + "\n"


def parse_elements(text: str, M: ModulePresentation) -> list[Vector]:
    """One element per line as comma separated coordinates."""
    out = []
    for n, line in _lines(text):
        try:
            out.append(parse_vector(line, M.field, M.rank))
        except ValueError as err:
            raise FormatError(str(err), n) from None
    return out


def parse_system(text: str) -> AdicSystem:
    """Blocks ``level <i>:`` holding a presentation of M_i and, for i > 0,
    ``psi:`` rows (``;`` separated, entries ``,`` separated) of M_i -> M_(i-1)."""
    head: list = []
    blocks: dict[int, list] = {}
    psi_text: dict[int, tuple[int, str]] = {}
    current = None
    for n, line in _lines(text):
        if line.startswith("level"):
            word, _, rest = line.partition(" ")
            num = rest.rstrip(":").strip()
            if not line.endswith(":") or not num.isdigit():
                raise FormatError("expected 'level <i>:'", n)
            current = int(num)
            if current in blocks:
                raise FormatError(f"level {current} given twice", n)
            blocks[current] = []
            continue
        n, key, value = _split(n, line)
        if current is None:
            if key not in ("field", "ideal"):
                raise FormatError(f"{key}: outside a level block", n)
            head.append((n, key, value))
        elif key == "psi":
            psi_text[current] = (n, value)
        else:
            blocks[current].append((n, key, value))
    if not blocks:
        raise FormatError("no level blocks")
    top = max(blocks)
    if sorted(blocks) != list(range(top + 1)):
        raise FormatError("levels must be 0, 1, ..., n without gaps")

    field, ideal = QQ, None
    for n, key, value in head:
        try:
            if key == "field":
                field = parse_field(value)
            else:
                ideal = parse_ideal(value, field)
        except ValueError as err:
            raise FormatError(str(err), n) from None
    modules = [_presentation(blocks[i], field, ideal) for i in range(top + 1)]
    transitions = []
    for i in range(1, top + 1):
        if i not in psi_text:
            raise FormatError(f"level {i} has no psi:")
        n, value = psi_text[i]
        src, dst = modules[i], modules[i - 1]
        try:
            rows = [parse_vector(r, src.field, src.rank) for r in value.split(";")]
        except ValueError as err:
            raise FormatError(f"psi: {err}", n) from None
        if len(rows) != dst.rank:
            raise FormatError(f"psi: needs {dst.rank} rows", n)
        transitions.append(rows)
    for i in psi_text:
        if i == 0:
            raise FormatError("level 0 takes no psi:", psi_text[0][0])
    return AdicSystem(lambda i: modules[i], lambda i: transitions[i], max_level=top)


def load(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")


def vector_text(v: Vector) -> str:
    return ", ".join(str(p) for p in v)


def polynomial_or_vector(text: str, M: ModulePresentation | None, field: Field = QQ):
    if M is None:
        return parse_polynomial(text, field)
    return parse_vector(text, M.field, M.rank)

