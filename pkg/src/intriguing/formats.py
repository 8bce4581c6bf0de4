"""Line-oriented text formats for graphs, geometries, sets, groups and caps.

Every writer emits LF-terminated text that its reader parses back to an
equal object; '#' starts a comment line.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .exactmath import field_make
from .geometry import Cap, IncidenceGeometry
from .graphcore import Graph, Permutation, mask_of
from .intrigue import IntrigueCertificate


class FormatError(ValueError):
    pass


def _lines(text: str) -> list[str]:
    return [l.strip() for l in text.splitlines() if l.strip() and not l.lstrip().startswith("#")]


def _header(line: str, keys: Sequence[str]) -> dict[str, str]:
    fields = {}
    for tok in line.split():
        if "=" not in tok:
            raise FormatError(f"bad header token {tok!r}")
        k, v = tok.split("=", 1)
        fields[k] = v
    missing = [k for k in keys if k not in fields]
    if missing:
        raise FormatError(f"header lacks {', '.join(missing)}")
    return fields


def _int(v: str, what: str) -> int:
    try:
        return int(v)
    except ValueError:
        raise FormatError(f"{what} must be an integer, got {v!r}") from None


# graphs ---------------------------------------------------------------------

def write_graph(g: Graph) -> str:
    out = [f"n={g.n}"]
    out += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(out) + "\n"


def read_graph(text: str, label: str = "") -> Graph:
    ls = _lines(text)
    if not ls:
        raise FormatError("empty graph file")
    n = _int(_header(ls[0], ["n"])["n"], "n")
    edges = []
    for l in ls[1:]:
        parts = l.split()
        if len(parts) != 2:
            raise FormatError(f"edge line {l!r} needs two vertices")
        u, v = _int(parts[0], "vertex"), _int(parts[1], "vertex")
        if not (0 <= u < n and 0 <= v < n):
            raise FormatError(f"edge ({u}, {v}) out of range")
        edges.append((u, v))
    return Graph.from_edges(n, edges, label)


# geometries -----------------------------------------------------------------

def write_geometry(geo: IncidenceGeometry) -> str:
    mu = "gq" if geo.kind == "gq" else ("raw" if geo.kind == "raw" else str(geo.mu))
    out = [f"points={geo.n_points} lines={len(geo.lines)} s={geo.s} t={geo.t} mu={mu}"]
    out += [" ".join(map(str, l)) for l in geo.lines]
    return "\n".join(out) + "\n"


def read_geometry(text: str, name: str = "") -> IncidenceGeometry:
    ls = _lines(text)
    if not ls:
        raise FormatError("empty geometry file")
    h = _header(ls[0], ["points", "lines", "s", "t", "mu"])
    n, m = _int(h["points"], "points"), _int(h["lines"], "lines")
    s, t = _int(h["s"], "s"), _int(h["t"], "t")
    if h["mu"] == "gq":
        kind, mu = "gq", None
    elif h["mu"] == "raw":
        kind, mu = "raw", None
    else:
        kind, mu = "pq", _int(h["mu"], "mu")
    lines = []
    for l in ls[1:]:
        pts = tuple(sorted(_int(x, "point") for x in l.split()))
        if any(not 0 <= p < n for p in pts):
            raise FormatError(f"line {l!r} has a point out of range")
        lines.append(pts)
    if len(lines) != m:
        raise FormatError(f"header says {m} lines, found {len(lines)}")
    return IncidenceGeometry(n, tuple(lines), s, t, kind, mu, name)


# sets -----------------------------------------------------------------------

@dataclass(frozen=True)
class SetEntry:
    members: tuple[int, ...]
    sign: str | None = None
    h1: int | None = None
    h2: int | None = None

    @property
    def mask(self) -> int:
        return mask_of(self.members)


_SIGN_OUT = {"positive": "pos", "negative": "neg"}
_SIGN_IN = {"pos": "positive", "neg": "negative"}


def entry(members: Iterable[int], cert: IntrigueCertificate | None = None) -> SetEntry:
    m = tuple(sorted(members))
    if cert is None:
        return SetEntry(m)
    return SetEntry(m, cert.sign, cert.h1, cert.h2)


def write_sets(entries: Iterable[SetEntry]) -> str:
    out = []
    for e in sorted(entries, key=lambda e: e.members):
        line = " ".join(map(str, e.members))
        if e.sign is not None:
            line += f" | sign={_SIGN_OUT[e.sign]} h1={e.h1} h2={e.h2}"
        out.append(line)
    return "".join(l + "\n" for l in out)


def read_sets(text: str) -> list[SetEntry]:
    res = []
    for l in _lines(text):
        body, _, ann = l.partition("|")
        members = tuple(_int(x, "vertex") for x in body.split())
        if list(members) != sorted(set(members)):
            raise FormatError(f"set {body.strip()!r} is not sorted and duplicate-free")
        if ann.strip():
            h = _header(ann, ["sign", "h1", "h2"])
            if h["sign"] not in _SIGN_IN:
                raise FormatError(f"unknown sign {h['sign']!r}")
            res.append(SetEntry(members, _SIGN_IN[h["sign"]], _int(h["h1"], "h1"), _int(h["h2"], "h2")))
        else:
            res.append(SetEntry(members))
    return res


# groups ---------------------------------------------------------------------

def write_group(gens: Iterable[Permutation]) -> str:
    return "".join(" ".join(map(str, p.image)) + "\n" for p in gens)


def read_group(text: str) -> list[Permutation]:
    return [Permutation(tuple(_int(x, "image") for x in l.split())) for l in _lines(text)]


# caps -----------------------------------------------------------------------

def write_cap(cap: Cap) -> str:
    out = [f"n={cap.n} q={cap.q} k={len(cap)}"]
    out += [" ".join(map(str, p)) for p in cap.points]
    return "\n".join(out) + "\n"


def read_cap(text: str) -> Cap:
    ls = _lines(text)
    if not ls:
        raise FormatError("empty cap file")
    h = _header(ls[0], ["n", "q", "k"])
    n, q, k = _int(h["n"], "n"), _int(h["q"], "q"), _int(h["k"], "k")
    field_make(q)
    pts = []
    for l in ls[1:]:
        v = tuple(_int(x, "coordinate") for x in l.split())
        if len(v) != n + 1 or any(not 0 <= x < q for x in v):
            raise FormatError(f"cap row {l!r} is not a vector of GF({q})^{n + 1}")
        pts.append(v)
    if len(pts) != k:
        raise FormatError(f"header says {k} points, found {len(pts)}")
    return Cap(n, q, tuple(pts))


def bundled_cap(name: str) -> Cap:
    path = Path(__file__).with_name("data") / f"{name}.cap"
    return read_cap(path.read_text())


# manifests ------------------------------------------------------------------

def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    inputs: dict[str, str] = field(default_factory=dict)     # path -> sha256
    outputs: dict[str, str] = field(default_factory=dict)
    exhaustive: bool = True
    wall_time: float = 0.0
    threads: int = 1
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))


def write_text(path, text: str) -> None:
    with open(path, "w", newline="\n") as f:
        f.write(text)
