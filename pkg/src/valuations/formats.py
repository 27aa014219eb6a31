"""Line-based text formats and the workspace loader.

Each file holds one or more blocks.  A block starts with a header line
(``poset``, ``valuation``, ``integrand``, ``biintegrand``, ``cdf`` or
``stepmap``) and continues with body lines until the next header.  Blank
lines and ``#`` comments are ignored.  Weights and values are exact
rationals written ``p/q`` (or a bare integer); decimals are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import FormatError, InputError, NameNotFound
from .integration import Integrand
from .interval import Cdf, StepMap
from .lang import parse
from .monad import BiIntegrand
from .poset import FinitePoset, _bits, build_poset
from .valuation import SimpleValuation, make_simple

HEADERS = ("poset", "valuation", "integrand", "biintegrand", "cdf", "stepmap")
_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")

EXTENSIONS = {
    ".poset": "poset",
    ".val": "valuation",
    ".fn": "function",
    ".cdf": "cdf",
    ".step": "stepmap",
    ".prob": "program",
}


def rational(token: str, line=None, source=None) -> Fraction:
    if not _RATIONAL.match(token):
        raise FormatError(f"{token!r} is not an exact rational p/q", line, source)
    try:
        return Fraction(token)
    except ZeroDivisionError:
        raise FormatError(f"{token!r} has a zero denominator", line, source) from None


@dataclass
class Block:
    kind: str
    header: list[str]
    line: int
    body: list[tuple[int, list[str]]] = field(default_factory=list)
    source: str | None = None

    def fail(self, message, line=None):
        raise FormatError(message, line or self.line, self.source)


def split_blocks(text: str, source: str | None = None) -> list[Block]:
    blocks: list[Block] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        if tokens[0] in HEADERS:
            blocks.append(Block(tokens[0], tokens, lineno, source=source))
        elif not blocks:
            raise FormatError(f"expected a header ({', '.join(HEADERS)}), got {tokens[0]!r}", lineno, source)
        else:
            blocks[-1].body.append((lineno, tokens))
    return blocks


def _expect(block: Block, pattern: list[str]):
    """Check header shape; ``pattern`` lists literal keywords and ``None`` for free slots."""
    if len(block.header) != len(pattern):
        block.fail(f"malformed {block.kind} header: expected `{' '.join(p or '<name>' for p in pattern)}`")
    for tok, want in zip(block.header, pattern):
        if want is not None and tok != want:
            block.fail(f"malformed {block.kind} header: expected {want!r}, got {tok!r}")


def _lookup(posets: dict[str, FinitePoset], name: str, block: Block) -> FinitePoset:
    if name not in posets:
        raise NameNotFound(f"{block.source or '<input>'}:{block.line}: unknown poset {name!r}")
    return posets[name]


def _wrap(block: Block, lineno: int, fn):
    try:
        return fn()
    except FormatError:
        raise
    except InputError as exc:
        raise FormatError(str(exc), lineno, block.source) from None
    except ValueError as exc:
        raise FormatError(str(exc), lineno, block.source) from None


def read_poset(block: Block) -> tuple[str, FinitePoset]:
    _expect(block, ["poset", None])
    name = block.header[1]
    elems, covers = [], []
    for lineno, toks in block.body:
        if toks[0] == "elem" and len(toks) == 2:
            elems.append(toks[1])
        elif toks[0] == "cover" and len(toks) == 3:
            covers.append((toks[1], toks[2]))
        else:
            block.fail(f"expected `elem <id>` or `cover <id> <id>`, got {' '.join(toks)!r}", lineno)
    return name, _wrap(block, block.line, lambda: build_poset(elems, covers, name=name))


def read_valuation(block: Block, posets) -> tuple[str, SimpleValuation]:
    _expect(block, ["valuation", None, "on", None])
    p = _lookup(posets, block.header[3], block)
    atoms = []
    for lineno, toks in block.body:
        if toks[0] != "atom" or len(toks) != 3:
            block.fail(f"expected `atom <element> <p/q>`, got {' '.join(toks)!r}", lineno)
        atoms.append((toks[1], rational(toks[2], lineno, block.source)))
    return block.header[1], _wrap(block, block.line, lambda: make_simple(p, atoms))


def read_integrand(block: Block, posets) -> tuple[str, Integrand]:
    _expect(block, ["integrand", None, "on", None])
    p = _lookup(posets, block.header[3], block)
    values = {}
    for lineno, toks in block.body:
        if toks[0] != "val" or len(toks) != 3:
            block.fail(f"expected `val <element> <p/q>`, got {' '.join(toks)!r}", lineno)
        if toks[1] in values:
            block.fail(f"duplicate value for {toks[1]!r}", lineno)
        values[toks[1]] = rational(toks[2], lineno, block.source)
    return block.header[1], _wrap(block, block.line, lambda: Integrand.from_dict(p, values))


def read_biintegrand(block: Block, posets) -> tuple[str, BiIntegrand]:
    _expect(block, ["biintegrand", None, "on", None, None])
    d = _lookup(posets, block.header[3], block)
    e = _lookup(posets, block.header[4], block)
    values = {}
    for lineno, toks in block.body:
        if toks[0] != "val" or len(toks) != 4:
            block.fail(f"expected `val <x> <y> <p/q>`, got {' '.join(toks)!r}", lineno)
        if (toks[1], toks[2]) in values:
            block.fail(f"duplicate value for ({toks[1]}, {toks[2]})", lineno)
        values[(toks[1], toks[2])] = rational(toks[3], lineno, block.source)
    return block.header[1], _wrap(block, block.line, lambda: BiIntegrand.from_dict(d, e, values))


def read_cdf(block: Block) -> tuple[str, Cdf]:
    _expect(block, ["cdf", None])
    points = []
    for lineno, toks in block.body:
        if toks[0] != "point" or len(toks) != 4:
            block.fail(f"expected `point <x> <left> <right>`, got {' '.join(toks)!r}", lineno)
        points.append(tuple(rational(t, lineno, block.source) for t in toks[1:]))
    return block.header[1], _wrap(block, block.line, lambda: Cdf.from_points(points))


def read_stepmap(block: Block, posets) -> tuple[str, StepMap]:
    _expect(block, ["stepmap", None, "level", None, "on", None])
    try:
        level = int(block.header[3])
    except ValueError:
        block.fail(f"level must be an integer, got {block.header[3]!r}")
    p = _lookup(posets, block.header[5], block)
    cells = []
    for lineno, toks in block.body:
        if toks[0] != "cells":
            block.fail(f"expected `cells <id> ...`, got {' '.join(toks)!r}", lineno)
        cells.extend(toks[1:])
    return block.header[1], _wrap(block, block.line, lambda: StepMap.from_ids(p, level, cells))


# -- serialisation -------------------------------------------------------


def hasse_covers(p: FinitePoset) -> list[tuple[str, str]]:
    out = []
    for i in range(len(p)):
        above = p.up[i] & ~(1 << i)
        for j in _bits(above):
            between = above & p.down[j] & ~(1 << j)
            if not between:
                out.append((p.elements[i], p.elements[j]))
    return out


def dump_poset(p: FinitePoset, name: str) -> str:
    lines = [f"poset {name}"]
    lines += [f"elem {x}" for x in p.elements]
    lines += [f"cover {a} {b}" for a, b in hasse_covers(p)]
    return "\n".join(lines) + "\n"


def dump_valuation(nu: SimpleValuation, name: str, poset_name: str) -> str:
    lines = [f"valuation {name} on {poset_name}"]
    lines += [f"atom {nu.poset.elements[i]} {w}" for i, w in nu.atoms]
    return "\n".join(lines) + "\n"


def dump_integrand(h: Integrand, name: str, poset_name: str) -> str:
    lines = [f"integrand {name} on {poset_name}"]
    lines += [f"val {x} {v}" for x, v in zip(h.poset.elements, h.values)]
    return "\n".join(lines) + "\n"


def dump_biintegrand(h: BiIntegrand, name: str, left_name: str, right_name: str) -> str:
    lines = [f"biintegrand {name} on {left_name} {right_name}"]
    for x, row in zip(h.left.elements, h.values):
        lines += [f"val {x} {y} {v}" for y, v in zip(h.right.elements, row)]
    return "\n".join(lines) + "\n"


def dump_cdf(F: Cdf, name: str) -> str:
    lines = [f"cdf {name}"]
    lines += [f"point {x} {l} {r}" for x, l, r in zip(F.breakpoints, F.left, F.right)]
    return "\n".join(lines) + "\n"


def dump_stepmap(f: StepMap, name: str, poset_name: str) -> str:
    return f"stepmap {name} level {f.level} on {poset_name}\ncells {' '.join(f.ids)}\n"


# -- workspace -----------------------------------------------------------


@dataclass
class Workspace:
    posets: dict[str, FinitePoset] = field(default_factory=dict)
    valuations: dict[str, SimpleValuation] = field(default_factory=dict)
    integrands: dict[str, Integrand] = field(default_factory=dict)
    biintegrands: dict[str, BiIntegrand] = field(default_factory=dict)
    cdfs: dict[str, Cdf] = field(default_factory=dict)
    stepmaps: dict[str, StepMap] = field(default_factory=dict)
    programs: dict = field(default_factory=dict)

    def get(self, kind: str, name: str):
        table = getattr(self, kind)
        if name not in table:
            raise NameNotFound(f"no {kind[:-1]} named {name!r}")
        return table[name]

    def add(self, kind: str, name: str, value, block: Block | None = None):
        table = getattr(self, kind)
        if name in table:
            where = f"{block.source}:{block.line}: " if block else ""
            raise FormatError(f"{where}duplicate {kind[:-1]} name {name!r}")
        table[name] = value

    def load_text(self, text: str, source: str | None = None):
        """Load every block of ``text``; posets first so later blocks may refer to them."""
        blocks = split_blocks(text, source)
        for b in blocks:
            if b.kind == "poset":
                name, p = read_poset(b)
                self.add("posets", name, p, b)
        self._load_rest(blocks)

    def _load_rest(self, blocks: list[Block]):
        for b in blocks:
            if b.kind == "valuation":
                self.add("valuations", *read_valuation(b, self.posets), block=b)
            elif b.kind == "integrand":
                self.add("integrands", *read_integrand(b, self.posets), block=b)
            elif b.kind == "biintegrand":
                self.add("biintegrands", *read_biintegrand(b, self.posets), block=b)
            elif b.kind == "cdf":
                self.add("cdfs", *read_cdf(b), block=b)
            elif b.kind == "stepmap":
                self.add("stepmaps", *read_stepmap(b, self.posets), block=b)


def load_workspace(directory) -> Workspace:
    """Read every recognised file under ``directory`` (sorted, non-recursive)."""
    root = Path(directory)
    if not root.is_dir():
        raise InputError(f"{root} is not a directory")
    ws = Workspace()
    files = sorted(p for p in root.iterdir() if p.suffix in EXTENSIONS and p.is_file())
    parsed = []
    for path in files:
        if EXTENSIONS[path.suffix] == "program":
            continue
        blocks = split_blocks(path.read_text(), path.name)
        parsed.append(blocks)
        for b in blocks:
            if b.kind == "poset":
                name, p = read_poset(b)
                ws.add("posets", name, p, b)
    for blocks in parsed:
        ws._load_rest(blocks)
    for path in files:
        if EXTENSIONS[path.suffix] == "program":
            ws.add("programs", path.stem, parse(path.read_text(), posets=ws.posets, cdfs=ws.cdfs, stepmaps=ws.stepmaps))
    return ws
