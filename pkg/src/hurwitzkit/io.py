"""Reading group and equipment files, and parsing words typed by a user.

A group file has an optional ``degree: d`` header followed by one
generator per line in cycle notation.  An equipment file names its group
file with ``group: path`` (relative to the equipment file) and lists one
class representative per line.  ``#`` starts a comment in both.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .cgraph import CGraph, EquippedGroup
from .errors import ParseError
from .groups import FiniteGroup, group_from_text

_TOKEN = re.compile(r"(?:\([^()]*\))+|\S+")


@dataclass
class EquipmentSpec:
    group_path: Path
    representatives: list[str]
    name: str = ""

    def load(self, cap: int | None = None) -> EquippedGroup:
        G = load_group(self.group_path, cap)
        return EquippedGroup.from_representatives(G, self.representatives)


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def load_group(path: str | Path, cap: int | None = None) -> FiniteGroup:
    text = Path(path).read_text()
    return group_from_text(text) if cap is None else group_from_text(text, cap)


def parse_equipment_text(text: str, base: Path, name: str = "") -> EquipmentSpec:
    group_path, reps = None, []
    for raw in text.splitlines():
        line = _strip(raw)
        if not line:
            continue
        if line.lower().startswith("group:"):
            if group_path is not None:
                raise ParseError("equipment names two group files")
            group_path = base / line.split(":", 1)[1].strip()
        else:
            reps.append(line)
    if group_path is None:
        raise ParseError("equipment file lacks a 'group:' line")
    if not reps:
        raise ParseError("equipment file lists no representatives")
    return EquipmentSpec(group_path, reps, name)


def load_equipment(path: str | Path) -> EquipmentSpec:
    path = Path(path)
    return parse_equipment_text(path.read_text(), path.parent, path.stem)


def tokens(text: str) -> list[str]:
    """Split on whitespace, keeping runs like ``(1 2)(3 4)`` together."""
    return _TOKEN.findall(text)


def parse_word(text: str, gamma: CGraph) -> list[int]:
    """Vertices of a word given as vertex indices (``v3`` or ``3``) or group elements."""
    out = []
    G = gamma.group
    for tok in tokens(text):
        m = re.fullmatch(r"v?(\d+)", tok)
        if m:
            v = int(m.group(1))
            if not 0 <= v < gamma.n_vertices:
                raise ParseError(f"vertex {v} out of range")
            out.append(v)
            continue
        if G is None:
            raise ParseError(f"cannot read {tok!r}: graph has no group")
        g = G.parse_element(tok)
        try:
            out.append(gamma.vertex_of(g))
        except KeyError:
            raise ParseError(f"{tok} is not in O") from None
    return out


def parse_tau(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ParseError(f"bad type vector {text!r}") from None
