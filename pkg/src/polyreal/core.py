"""Chirotopes, exact determinants and the facet structure of uniform chirotopes.

Signs are plain ints in {-1, 0, 1}. An r-tuple is a strictly increasing
tuple of element indices; chirotope values are stored over the lexicographic
order of all r-subsets and permuted queries are resolved by parity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, lcm
from typing import Iterable, Sequence

import numpy as np

from .errors import BadFormat, DegenerateSpan, NotUniform

SIGN_CHARS = {1: "+", -1: "-", 0: "0"}
CHAR_SIGNS = {"+": 1, "-": -1, "0": 0}


# ---------------------------------------------------------------------------
# combinatorics


@lru_cache(maxsize=None)
def r_subsets(n: int, r: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.combinations(range(n), r))


@lru_cache(maxsize=None)
def subset_index(n: int, r: int) -> dict[tuple[int, ...], int]:
    return {t: i for i, t in enumerate(r_subsets(n, r))}


def sort_with_parity(seq: Sequence[int]) -> tuple[tuple[int, ...] | None, int]:
    """Sort ``seq`` and return ``(sorted_tuple, sign_of_permutation)``.

    Returns ``(None, 0)`` when ``seq`` has a repeated element.
    """
    seq = list(seq)
    sign = 1
    # insertion sort; tuples are short
    for i in range(1, len(seq)):
        j = i
        while j > 0 and seq[j - 1] > seq[j]:
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(seq, seq[1:]):
        if a == b:
            return None, 0
    return tuple(seq), sign


def insert_sorted(base: tuple[int, ...], x: int) -> tuple[tuple[int, ...], int]:
    """Sorted tuple of ``base + (x,)`` and the parity of moving x into place."""
    k = sum(1 for b in base if b > x)
    pos = len(base) - k
    return base[:pos] + (x,) + base[pos:], (-1) ** k


# ---------------------------------------------------------------------------
# exact determinants


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    m = [list(r) for r in rows]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        row_k = m[k]
        for i in range(k + 1, n):
            row_i = m[i]
            a = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - a * row_k[j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def exact_det(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant of a rational matrix.

    Each row is scaled to integers by the lcm of its denominators, which
    changes the determinant by a known positive factor.
    """
    scale = 1
    int_rows = []
    for row in matrix:
        row = [Fraction(v) for v in row]
        den = lcm(*(v.denominator for v in row))
        scale *= den
        int_rows.append([v.numerator * (den // v.denominator) for v in row])
    return Fraction(bareiss_det(int_rows), scale)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# configurations


@dataclass(frozen=True)
class RationalConfiguration:
    """n points with exact rational coordinates in d-space."""

    points: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        pts = tuple(tuple(Fraction(c) for c in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValueError("empty configuration")
        d = len(pts[0])
        if any(len(p) != d for p in pts):
            raise ValueError("points have mixed dimensions")
        if len(pts) < d + 1:
            raise ValueError(f"need at least d+1={d + 1} points, got {len(pts)}")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def d(self) -> int:
        return len(self.points[0])

    def homogenized_int_rows(self) -> list[list[int]]:
        """Rows (p, 1) scaled by a positive integer; determinant signs are kept."""
        rows = []
        for p in self.points:
            den = lcm(*(c.denominator for c in p))
            rows.append([c.numerator * (den // c.denominator) for c in p] + [den])
        return rows

    def on_unit_sphere(self) -> list[bool]:
        return [sum(c * c for c in p) == 1 for p in self.points]

    def to_float(self) -> np.ndarray:
        return np.array([[float(c) for c in p] for p in self.points])

    def appended(self, point: Iterable) -> "RationalConfiguration":
        return RationalConfiguration(self.points + (tuple(Fraction(c) for c in point),))

    def to_json(self) -> list[list[str]]:
        return [[fraction_to_str(c) for c in p] for p in self.points]

    @classmethod
    def from_json(cls, data) -> "RationalConfiguration":
        if isinstance(data, dict):
            data = data["points"]
        return cls(tuple(tuple(parse_fraction(c) for c in p) for p in data))


def fraction_to_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or "." in text or "e" in text.lower():
        raise BadFormat(f"rational coordinates must be 'p/q' strings, got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise BadFormat(f"bad rational {text!r}") from exc


@dataclass(frozen=True)
class NumericConfiguration:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < pts.shape[1] + 1:
            raise ValueError(f"bad configuration shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("non-finite coordinate")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


# ---------------------------------------------------------------------------
# chirotopes


@dataclass(frozen=True)
class Chirotope:
    n: int
    r: int
    signs: tuple[int, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if len(signs) != comb(self.n, self.r):
            raise ValueError(f"expected {comb(self.n, self.r)} signs, got {len(signs)}")
        if any(s not in (-1, 0, 1) for s in signs):
            raise ValueError("signs must be -1, 0 or 1")
        if not any(signs):
            raise ValueError("chirotope is identically zero")
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "_index", subset_index(self.n, self.r))

    @property
    def is_uniform(self) -> bool:
        return 0 not in self.signs

    def tuples(self) -> tuple[tuple[int, ...], ...]:
        return r_subsets(self.n, self.r)

    def __call__(self, *elements: int) -> int:
        """Value on an arbitrary (possibly unsorted) tuple of elements."""
        if len(elements) == 1 and isinstance(elements[0], (tuple, list)):
            elements = tuple(elements[0])
        if len(elements) != self.r:
            raise ValueError(f"need {self.r} elements")
        key, parity = sort_with_parity(elements)
        if key is None:
            return 0
        return parity * self.signs[self._index[key]]

    def sign_of(self, sorted_tuple: tuple[int, ...]) -> int:
        return self.signs[self._index[sorted_tuple]]

    def negated(self) -> "Chirotope":
        return Chirotope(self.n, self.r, tuple(-s for s in self.signs))

    def normalized(self) -> "Chirotope":
        """Global sign chosen so the first nonzero stored value is +."""
        first = next(s for s in self.signs if s)
        return self if first > 0 else self.negated()

    def relabeled(self, perm: Sequence[int]) -> "Chirotope":
        """Chirotope of the relabeling element i -> perm[i]."""
        inv = [0] * self.n
        for i, p in enumerate(perm):
            inv[p] = i
        return Chirotope(
            self.n, self.r, tuple(self(tuple(inv[e] for e in t)) for t in self.tuples())
        )

    def to_text(self) -> str:
        chi = self.normalized()
        return f"{self.n} {self.r}\n" + "".join(SIGN_CHARS[s] for s in chi.signs) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Chirotope":
        n, r, body = _parse_sign_text(text, "+-0")
        return cls(n, r, tuple(CHAR_SIGNS[c] for c in body))


def _parse_sign_text(text: str, alphabet: str) -> tuple[int, int, str]:
    parts = text.split()
    if len(parts) < 2:
        raise BadFormat("expected header 'n r' followed by a sign string")
    try:
        n, r = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise BadFormat("header must be two integers 'n r'") from exc
    body = "".join(parts[2:])
    if len(body) != comb(n, r):
        raise BadFormat(f"sign string has length {len(body)}, expected C({n},{r})={comb(n, r)}")
    bad = set(body) - set(alphabet)
    if bad:
        raise BadFormat(f"unexpected characters {sorted(bad)} in sign string")
    return n, r, body


def chirotope_of_points(config: RationalConfiguration) -> Chirotope:
    """Exact chirotope of the homogenized configuration (rank d+1)."""
    rows = config.homogenized_int_rows()
    r = config.d + 1
    signs = tuple(_sign(bareiss_det([rows[i] for i in t])) for t in r_subsets(config.n, r))
    if not any(signs):
        raise DegenerateSpan("configuration does not span its ambient space")
    return Chirotope(config.n, r, signs)


# ---------------------------------------------------------------------------
# axioms


@dataclass(frozen=True)
class AxiomViolation:
    lam: tuple[int, ...]
    quad: tuple[int, int, int, int]
    products: tuple[int, int, int]


def three_term_products(chi, lam: tuple[int, ...], quad: tuple[int, int, int, int]) -> tuple[int, int, int]:
    a, b, c, d = quad
    return (
        chi(lam + (a, b)) * chi(lam + (c, d)),
        -chi(lam + (a, c)) * chi(lam + (b, d)),
        chi(lam + (a, d)) * chi(lam + (b, c)),
    )


def check_axioms(chi: Chirotope) -> list[AxiomViolation]:
    """All (lambda, a, b, c, d) at which the three-term condition fails."""
    violations = []
    if chi.r < 2:
        return violations
    for lam in itertools.combinations(range(chi.n), chi.r - 2):
        rest = [e for e in range(chi.n) if e not in lam]
        for quad in itertools.combinations(rest, 4):
            prods = three_term_products(chi, lam, quad)
            vals = set(prods)
            if vals != {0} and not {-1, 1} <= vals:
                violations.append(AxiomViolation(lam, quad, prods))
    return violations


# ---------------------------------------------------------------------------
# facets


def facet_candidates(n: int, r: int):
    """Yield each (r-1)-subset F with its list of (sorted tuple, parity) for x outside F."""
    for face in itertools.combinations(range(n), r - 1):
        members = set(face)
        yield face, [insert_sorted(face, x) for x in range(n) if x not in members]


def supported_faces(chi: Chirotope) -> set[tuple[int, ...]]:
    """(r-1)-subsets whose outside elements all lie strictly on one side.

    Works for non-uniform chirotopes too: any zero disqualifies the subset.
    """
    facets = set()
    for face, extensions in facet_candidates(chi.n, chi.r):
        seen = {parity * chi.sign_of(t) for t, parity in extensions}
        if len(seen) == 1 and 0 not in seen:
            facets.add(face)
    return facets


def _require_uniform(chi: Chirotope) -> None:
    if not chi.is_uniform:
        raise NotUniform("operation needs a uniform chirotope")


def facets_of(chi: Chirotope) -> set[tuple[int, ...]]:
    _require_uniform(chi)
    return supported_faces(chi)


def is_k_neighborly(chi: Chirotope, k: int) -> bool:
    """Every k-subset of elements lies in some facet."""
    facets = facets_of(chi)
    covered = set()
    for f in facets:
        covered.update(itertools.combinations(f, k))
    return len(covered) == comb(chi.n, k)


def is_matroid_polytope(chi: Chirotope) -> bool:
    return is_k_neighborly(chi, 1)


def is_neighborly(chi: Chirotope) -> bool:
    return all(is_k_neighborly(chi, k) for k in range(1, (chi.r - 1) // 2 + 1))
