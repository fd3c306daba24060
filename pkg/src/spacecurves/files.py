"""Text file format for curves and the named fixture corpus.

Format::

    ring p=<prime> base=<field|dual>
    gens:
    <one polynomial per line>

Blank lines and lines starting with ``#`` are ignored.  Printing a parsed
file and parsing it again reproduces the same normalized content.
"""

from __future__ import annotations

import re
from importlib import resources

from .errors import ParseError
from .groebner import Ideal
from .polyring import Poly
from .scalars import BaseRing

_HEADER = re.compile(r"^ring\s+p=(\d+)\s+base=(field|dual)\s*$")


class CurveFile:
    """A parsed curve file: a base ring and a list of generators."""

    def __init__(self, base: BaseRing, gens):
        self.base = base
        self.gens = list(gens)

    @classmethod
    def parse(cls, text: str) -> "CurveFile":
        lines = [
            ln.strip()
            for ln in text.splitlines()
            if ln.strip() and not ln.strip().startswith("#")
        ]
        if not lines:
            raise ParseError("empty curve file")
        m = _HEADER.match(lines[0])
        if not m:
            raise ParseError(f"bad header line {lines[0]!r}")
        p = int(m.group(1))
        if p < 2 or any(p % q == 0 for q in range(2, min(p, 1000))):
            raise ParseError(f"p={p} is not prime")
        base = BaseRing(p, m.group(2) == "dual")
        if len(lines) < 2 or lines[1] != "gens:":
            raise ParseError("expected 'gens:' on the second line")
        gens = []
        for ln in lines[2:]:
            g = Poly.parse(ln, base)
            if not g.is_homogeneous():
                raise ParseError(f"generator {ln!r} is not homogeneous")
            gens.append(g)
        if not gens:
            raise ParseError("curve file lists no generators")
        return cls(base, gens)

    @classmethod
    def load(cls, path) -> "CurveFile":
        with open(path, "r") as f:
            return cls.parse(f.read())

    @classmethod
    def from_ideal(cls, I: Ideal) -> "CurveFile":
        return cls(I.base, I.gens)

    def to_ideal(self) -> Ideal:
        return Ideal(self.base, self.gens)

    def text(self) -> str:
        kind = "dual" if self.base.dual else "field"
        out = [f"ring p={self.base.p} base={kind}", "gens:"]
        out.extend(str(g) for g in self.gens)
        return "\n".join(out) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as f:
            f.write(self.text())

    def __eq__(self, other):
        return (
            isinstance(other, CurveFile)
            and self.base == other.base
            and self.gens == other.gens
        )

    def __repr__(self):
        return f"CurveFile(p={self.base.p}, dual={self.base.dual}, gens={len(self.gens)})"


# -- fixture corpus ---------------------------------------------------------


def corpus_names():
    """Names of the shipped fixtures, sorted."""
    root = resources.files("spacecurves") / "corpus"
    return sorted(
        entry.name[: -len(".curve")]
        for entry in root.iterdir()
        if entry.name.endswith(".curve")
    )


def load_corpus(name: str) -> CurveFile:
    """Load a shipped fixture by name (without the .curve suffix)."""
    entry = resources.files("spacecurves") / "corpus" / f"{name}.curve"
    try:
        text = entry.read_text()
    except FileNotFoundError:
        raise ParseError(
            f"no corpus fixture {name!r}; available: {', '.join(corpus_names())}"
        )
    return CurveFile.parse(text)
