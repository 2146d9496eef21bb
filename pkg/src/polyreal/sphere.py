"""Simplicial spheres given by facet lists, and the signs their facets force."""

from __future__ import annotations

import hashlib
import itertools
import json
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from math import comb

from .core import (
    CHAR_SIGNS,
    SIGN_CHARS,
    Chirotope,
    _parse_sign_text,
    insert_sorted,
    sort_with_parity,
    subset_index,
)
from .errors import BadFormat, InconsistentOrientation, NotPseudoManifold

_BRACKET = re.compile(r"\[([^\[\]]*)\]")


@dataclass(frozen=True)
class SimplicialSphere:
    """Facet list of a simplicial (d-1)-sphere on vertices 0..n-1.

    ``d`` is the polytope dimension, so each facet has d vertices and the
    associated chirotope has rank d + 1.
    """

    n: int
    d: int
    facets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        facets = tuple(sorted(tuple(sorted(f)) for f in self.facets))
        object.__setattr__(self, "facets", facets)
        validate_sphere(self)

    @property
    def r(self) -> int:
        return self.d + 1

    def digest(self) -> str:
        payload = json.dumps({"n": self.n, "d": self.d, "facets": self.facets}, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def to_text(self) -> str:
        return " ".join("[" + " ".join(map(str, f)) + "]" for f in self.facets)

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "facets": [list(f) for f in self.facets]}

    def stacked(self, facet, new_vertex: int | None = None) -> "SimplicialSphere":
        """Sphere obtained by stacking a new vertex over ``facet``."""
        facet = tuple(sorted(facet))
        if facet not in self.facets:
            raise ValueError(f"{facet} is not a facet")
        v = self.n if new_vertex is None else new_vertex
        new = [f for f in self.facets if f != facet]
        new += [tuple(sorted(sub + (v,))) for sub in itertools.combinations(facet, self.d - 1)]
        return SimplicialSphere(max(self.n, v + 1), self.d, tuple(new))


def validate_sphere(s: SimplicialSphere) -> None:
    if not s.facets:
        raise BadFormat("empty facet list")
    if len(set(s.facets)) != len(s.facets):
        raise BadFormat("repeated facet")
    for f in s.facets:
        if len(f) != s.d or len(set(f)) != s.d:
            raise BadFormat(f"facet {list(f)} does not have {s.d} distinct vertices")
        if f[0] < 0 or f[-1] >= s.n:
            raise BadFormat(f"facet {list(f)} has a vertex outside [0, {s.n})")
    used = {v for f in s.facets for v in f}
    if len(used) != s.n:
        missing = sorted(set(range(s.n)) - used)
        raise BadFormat(f"vertices {missing} lie in no facet")
    counts = Counter(sub for f in s.facets for sub in itertools.combinations(f, s.d - 1))
    for sub, k in sorted(counts.items()):
        if k != 2:
            raise NotPseudoManifold(f"subridge {list(sub)} lies in {k} facets", sub)
    # facet adjacency must be connected
    by_ridge = defaultdict(list)
    for i, f in enumerate(s.facets):
        for sub in itertools.combinations(f, s.d - 1):
            by_ridge[sub].append(i)
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for sub in itertools.combinations(s.facets[i], s.d - 1):
            for j in by_ridge[sub]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
    if len(seen) != len(s.facets):
        raise NotPseudoManifold("facet adjacency graph is disconnected")


def load_sphere(text: str) -> SimplicialSphere:
    """Parse a bracketed facet list (``[0 1 2 3] [0 1 2 4] ...``) or its JSON form."""
    stripped = text.strip()
    if stripped.startswith("{") and '"facets"' in stripped:
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise BadFormat(f"bad JSON: {exc}") from exc
        return sphere_from_facets(data["facets"], n=data.get("n"), d=data.get("d"))
    # tolerate the LaTeX spacing of facet lists copied from typeset text
    cleaned = stripped.replace("\\,", " ").replace("$", " ")
    facets = []
    for m in _BRACKET.finditer(cleaned):
        tokens = m.group(1).replace(",", " ").split()
        try:
            facets.append([int(t) for t in tokens])
        except ValueError as exc:
            raise BadFormat(f"non-integer vertex in [{m.group(1)}]") from exc
    leftover = _BRACKET.sub(" ", cleaned)
    # an optional leading label such as "T2766 =" is allowed
    if not re.fullmatch(r"\s*([A-Za-z_#][\w#]*\s*[:=]?)?[\s,{}]*", leftover):
        raise BadFormat(f"unexpected text outside facets: {leftover.strip()[:40]!r}")
    if not facets:
        raise BadFormat("no bracketed facets found")
    return sphere_from_facets(facets)


def sphere_from_facets(facets, n: int | None = None, d: int | None = None) -> SimplicialSphere:
    facets = [tuple(int(v) for v in f) for f in facets]
    if not facets:
        raise BadFormat("empty facet list")
    if d is None:
        d = len(facets[0])
    if n is None:
        n = max(max(f) for f in facets) + 1
    return SimplicialSphere(int(n), int(d), tuple(facets))


def f_vector(s: SimplicialSphere) -> tuple[int, ...]:
    """(f_0, ..., f_{d-1}) counted from all subsets of facets."""
    out = []
    for k in range(1, s.d + 1):
        out.append(len({sub for f in s.facets for sub in itertools.combinations(f, k)}))
    return tuple(out)


# ---------------------------------------------------------------------------
# partial chirotopes


@dataclass(frozen=True)
class PartialChirotope:
    """Uniform sign data with holes; 0 marks an unknown value."""

    n: int
    r: int
    signs: tuple[int, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        signs = tuple(int(v) for v in self.signs)
        if len(signs) != comb(self.n, self.r):
            raise ValueError(f"expected {comb(self.n, self.r)} entries, got {len(signs)}")
        if any(v not in (-1, 0, 1) for v in signs):
            raise ValueError("entries must be -1, 0 (unknown) or 1")
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "_index", subset_index(self.n, self.r))

    @classmethod
    def from_chirotope(cls, chi: Chirotope) -> "PartialChirotope":
        if not chi.is_uniform:
            raise ValueError("partial chirotopes are uniform-only")
        return cls(chi.n, chi.r, chi.signs)

    def __call__(self, *elements: int) -> int:
        if len(elements) == 1 and isinstance(elements[0], (tuple, list)):
            elements = tuple(elements[0])
        key, parity = sort_with_parity(elements)
        if key is None:
            return 0
        return parity * self.signs[self._index[key]]

    def sign_of(self, sorted_tuple: tuple[int, ...]) -> int:
        return self.signs[self._index[sorted_tuple]]

    @property
    def known(self) -> int:
        return sum(1 for v in self.signs if v)

    @property
    def unknown(self) -> list[int]:
        return [i for i, v in enumerate(self.signs) if v == 0]

    def is_complete(self) -> bool:
        return 0 not in self.signs

    def to_chirotope(self) -> Chirotope:
        if not self.is_complete():
            raise ValueError("partial chirotope still has unknown entries")
        return Chirotope(self.n, self.r, self.signs)

    def extends(self, other: "PartialChirotope | Chirotope") -> bool:
        """True iff every known entry of ``other`` is shared by self."""
        return all(b == 0 or a == b for a, b in zip(self.signs, other.signs))

    def negated(self) -> "PartialChirotope":
        return PartialChirotope(self.n, self.r, tuple(-v for v in self.signs))

    def to_text(self) -> str:
        first = next((v for v in self.signs if v), 1)
        signs = self.signs if first > 0 else tuple(-v for v in self.signs)
        chars = {1: "+", -1: "-", 0: "?"}
        return f"{self.n} {self.r}\n" + "".join(chars[v] for v in signs) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PartialChirotope":
        n, r, body = _parse_sign_text(text, "+-?")
        values = {"+": 1, "-": -1, "?": 0}
        return cls(n, r, tuple(values[c] for c in body))


class _ParityUnionFind:
    """Union-find over tuple indices tracking sign parity relative to the root."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rel = [0] * size  # sign bit relative to parent

    def find(self, i: int) -> tuple[int, int]:
        path = []
        while self.parent[i] != i:
            path.append(i)
            i = self.parent[i]
        root, acc = i, 0
        for j in reversed(path):
            acc ^= self.rel[j]
            self.rel[j] = acc
            self.parent[j] = root
        return root, (self.rel[path[0]] if path else 0)

    def union(self, a: int, b: int, rel: int) -> bool:
        """Impose bit(a) xor bit(b) == rel; False on conflict."""
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra == rb:
            return (pa ^ pb) == rel
        self.parent[rb] = ra
        self.rel[rb] = pa ^ pb ^ rel
        return True


def _facet_extensions(s: SimplicialSphere, facet: tuple[int, ...]):
    members = set(facet)
    return [insert_sorted(facet, x) for x in range(s.n) if x not in members]


def tuples_with_face(s: SimplicialSphere) -> list[tuple[int, ...]]:
    """r-tuples that contain at least one facet, in lexicographic order."""
    found = set()
    for f in s.facets:
        found.update(t for t, _ in _facet_extensions(s, f))
    return sorted(found)


def partial_from_sphere(s: SimplicialSphere) -> PartialChirotope:
    """Signs on every r-tuple containing a facet, up to the fixed global sign.

    For a facet F the value chi(F, x) is the same for every x outside F.
    These equalities are closed under a parity union-find and seeded by
    setting the smallest tuple over the smallest facet to +.
    """
    index = subset_index(s.n, s.r)
    uf = _ParityUnionFind(len(index))
    for f in s.facets:
        ext = _facet_extensions(s, f)
        t0, p0 = ext[0]
        bit0 = 0 if p0 > 0 else 1
        for t, p in ext[1:]:
            bit = 0 if p > 0 else 1
            if not uf.union(index[t0], index[t], bit0 ^ bit):
                raise InconsistentOrientation(
                    f"facet {list(f)} forces tuple {list(t)} to contradict earlier equalities"
                )
    seed_tuple = min(t for t, _ in _facet_extensions(s, s.facets[0]))
    seed_root, seed_bit = uf.find(index[seed_tuple])
    signs = [0] * len(index)
    for t in tuples_with_face(s):
        root, bit = uf.find(index[t])
        if root != seed_root:
            raise InconsistentOrientation("sphere facets do not form one orientation class")
        signs[index[t]] = 1 if (bit ^ seed_bit) == 0 else -1
    return PartialChirotope(s.n, s.r, tuple(signs))


__all__ = [
    "SimplicialSphere",
    "PartialChirotope",
    "load_sphere",
    "sphere_from_facets",
    "f_vector",
    "partial_from_sphere",
    "tuples_with_face",
    "CHAR_SIGNS",
    "SIGN_CHARS",
]
