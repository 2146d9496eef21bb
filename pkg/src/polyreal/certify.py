"""Non-realizability: three-term sign propagation, completion search and
biquadratic final polynomials.

A biquadratic final polynomial is found from the linear program in the
log-absolute values ``x_T = log|[T]|`` of the brackets. Each fully signed
three-term relation ``[ab][cd] - [ac][bd] + [ad][bc] = 0`` has a unique
minority-sign term, whose absolute value is the sum of the other two, so it
strictly dominates each of them. With unit slack this gives rows

    x_m1 + x_m2 - x_j1 - x_j2 >= 1.

Nonnegative multipliers summing the rows to ``0 >= positive`` prove that no
realization exists.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from .core import Chirotope, fraction_to_str, parse_fraction, sort_with_parity, subset_index
from .errors import BadFormat, Contradiction, InconsistentOrientation, NotUniform
from .lp import solve_feasibility
from .sphere import PartialChirotope, SimplicialSphere, partial_from_sphere

log = logging.getLogger(__name__)

Signs = Union[Chirotope, PartialChirotope]

# bracket pairs of the three terms, as positions in GPTriple.brackets
TERM_PAIRS = ((0, 1), (2, 3), (4, 5))


@dataclass(frozen=True)
class GPTriple:
    lam: tuple[int, ...]
    quad: tuple[int, int, int, int]

    @property
    def brackets(self) -> tuple[tuple[int, ...], ...]:
        """Sorted tuples for lam+ab, lam+cd, lam+ac, lam+bd, lam+ad, lam+bc."""
        return tuple(_bracket(self.lam, x, y)[0] for x, y in _pairs(self.quad))

    @property
    def parities(self) -> tuple[int, ...]:
        return tuple(_bracket(self.lam, x, y)[1] for x, y in _pairs(self.quad))

    def coefficients(self) -> tuple[int, int, int]:
        p = self.parities
        return (p[0] * p[1], -p[2] * p[3], p[4] * p[5])

    def products(self, signs: Signs) -> tuple[int, int, int]:
        """Term signs; 0 where a bracket is unknown (or zero)."""
        vals = [signs.sign_of(t) for t in self.brackets]
        c = self.coefficients()
        return tuple(c[k] * vals[i] * vals[j] for k, (i, j) in enumerate(TERM_PAIRS))


def _pairs(quad):
    a, b, c, d = quad
    return ((a, b), (c, d), (a, c), (b, d), (a, d), (b, c))


def _bracket(lam, x, y):
    key, parity = sort_with_parity(lam + (x, y))
    return key, parity


@dataclass(frozen=True)
class TripleTable:
    """All three-term relations of rank r on n elements, as index arrays."""

    n: int
    r: int
    triples: tuple[GPTriple, ...]
    brackets: np.ndarray  # (T, 6) bracket indices
    coefs: np.ndarray  # (T, 3) term coefficients
    by_bracket: tuple[tuple[int, ...], ...]


@lru_cache(maxsize=16)
def triple_table(n: int, r: int) -> TripleTable:
    index = subset_index(n, r)
    triples, brackets, coefs = [], [], []
    by_bracket = [[] for _ in index]
    if r >= 2:
        for lam in itertools.combinations(range(n), r - 2):
            rest = [e for e in range(n) if e not in lam]
            for quad in itertools.combinations(rest, 4):
                t = GPTriple(lam, quad)
                row = [index[b] for b in t.brackets]
                k = len(triples)
                triples.append(t)
                brackets.append(row)
                coefs.append(t.coefficients())
                for b in row:
                    by_bracket[b].append(k)
    return TripleTable(
        n,
        r,
        tuple(triples),
        np.array(brackets, dtype=np.int64).reshape(-1, 6),
        np.array(coefs, dtype=np.int64).reshape(-1, 3),
        tuple(tuple(v) for v in by_bracket),
    )


# ---------------------------------------------------------------------------
# propagation


class _Propagator:
    """Mutable sign vector with unit propagation over three-term relations."""

    def __init__(self, table: TripleTable, signs):
        self.table = table
        self.s = list(signs)
        self.brackets = table.brackets.tolist()
        self.coefs = table.coefs.tolist()
        self.trail: list[int] = []

    def assign(self, b: int, v: int, queue: list[int]) -> None:
        self.s[b] = v
        self.trail.append(b)
        queue.extend(self.table.by_bracket[b])

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            self.s[self.trail.pop()] = 0

    def run(self, queue: list[int]) -> int | None:
        """Propagate to a fixed point; returns a conflicting triple id or None."""
        s = self.s
        while queue:
            t = queue.pop()
            b = self.brackets[t]
            c = self.coefs[t]
            v = (c[0] * s[b[0]] * s[b[1]], c[1] * s[b[2]] * s[b[3]], c[2] * s[b[4]] * s[b[5]])
            zeros = v.count(0)
            if zeros == 0:
                if v[0] == v[1] == v[2]:
                    return t
            elif zeros == 1:
                k = v.index(0)
                x = v[(k + 1) % 3]
                if x != v[(k + 2) % 3]:
                    continue
                p, q = b[2 * k], b[2 * k + 1]
                if s[p] == 0 and s[q] != 0:
                    self.assign(p, -x * c[k] * s[q], queue)
                elif s[q] == 0 and s[p] != 0:
                    self.assign(q, -x * c[k] * s[p], queue)
        return None


def _signs_vector(pc: Signs) -> list[int]:
    if isinstance(pc, Chirotope) and not pc.is_uniform:
        raise NotUniform("sign propagation handles uniform chirotopes only")
    return list(pc.signs)


def gp_propagate(pc: Signs) -> PartialChirotope:
    """Close ``pc`` under the forced-sign rule of the three-term relations.

    Raises Contradiction with the witness triple if some relation has all
    three products forced to one sign.
    """
    table = triple_table(pc.n, pc.r)
    prop = _Propagator(table, _signs_vector(pc))
    conflict = prop.run(list(range(len(table.triples))))
    if conflict is not None:
        raise Contradiction(table.triples[conflict])
    return PartialChirotope(pc.n, pc.r, tuple(prop.s))


# ---------------------------------------------------------------------------
# completion search


@dataclass
class CompletionResult:
    status: str  # "no_completion" | "completions" | "cap_exceeded"
    completions: list[Chirotope] = field(default_factory=list)
    truncated: bool = False
    nodes: int = 0


def _branch_bracket(prop: _Propagator) -> int:
    """Unknown bracket occurring most often as the lone unknown of a triple."""
    s = prop.s
    counts: dict[int, int] = {}
    for row in prop.brackets:
        lone = -1
        for b in row:
            if s[b] == 0:
                if lone >= 0:
                    lone = -2
                    break
                lone = b
        if lone >= 0:
            counts[lone] = counts.get(lone, 0) + 1
    if counts:
        return min(counts, key=lambda b: (-counts[b], b))
    return s.index(0)


def complete(pc: Signs, cap: int = 10_000, node_cap: int = 10_000_000) -> CompletionResult:
    """All uniform chirotopes extending ``pc``, by backtracking with propagation.

    Branches take + before -. Stops once ``cap`` completions or ``node_cap``
    search nodes are reached, flagging the result as truncated.
    """
    table = triple_table(pc.n, pc.r)
    prop = _Propagator(table, _signs_vector(pc))
    result = CompletionResult("completions")
    if prop.run(list(range(len(table.triples)))) is not None:
        result.status = "no_completion"
        result.nodes = 1
        return result

    def search() -> bool:
        result.nodes += 1
        if result.nodes > node_cap:
            return False
        if 0 not in prop.s:
            result.completions.append(Chirotope(pc.n, pc.r, tuple(prop.s)))
            return len(result.completions) < cap
        b = _branch_bracket(prop)
        for v in (1, -1):
            mark = len(prop.trail)
            queue: list[int] = []
            prop.assign(b, v, queue)
            ok = prop.run(queue) is None
            if ok and not search():
                prop.undo(mark)
                return False
            prop.undo(mark)
        return True

    finished = search()
    if not finished:
        result.status = "cap_exceeded"
        result.truncated = True
    elif not result.completions:
        result.status = "no_completion"
    return result


# ---------------------------------------------------------------------------
# biquadratic final polynomials


@dataclass(frozen=True)
class BfpInequality:
    triple: GPTriple
    minority: int
    majority: int

    def terms(self) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
        br = self.triple.brackets
        i, j = TERM_PAIRS[self.minority]
        k, l = TERM_PAIRS[self.majority]
        return (br[i], br[j]), (br[k], br[l])


@dataclass(frozen=True)
class BfpCertificate:
    inequalities: tuple[BfpInequality, ...]
    multipliers: tuple[Fraction, ...]

    def to_json(self) -> list[dict]:
        return [
            {
                "lambda": list(q.triple.lam),
                "quad": list(q.triple.quad),
                "minority": q.minority,
                "majority": q.majority,
                "multiplier": fraction_to_str(m),
            }
            for q, m in zip(self.inequalities, self.multipliers)
        ]

    @classmethod
    def from_json(cls, data: list[dict]) -> "BfpCertificate":
        try:
            ineqs = tuple(
                BfpInequality(GPTriple(tuple(e["lambda"]), tuple(e["quad"])), int(e["minority"]), int(e["majority"]))
                for e in data
            )
            mults = tuple(parse_fraction(e["multiplier"]) for e in data)
        except (KeyError, TypeError) as exc:
            raise BadFormat(f"bad certificate entry: {exc}") from exc
        return cls(ineqs, mults)


def _bfp_rows(signs: Signs) -> list[tuple[BfpInequality, tuple[int, int, int, int]]]:
    """Log-form rows (minority pair, majority pair) of every fully signed triple."""
    table = triple_table(signs.n, signs.r)
    s = _signs_vector(signs)
    rows = []
    for t, (b, c) in enumerate(zip(table.brackets.tolist(), table.coefs.tolist())):
        if not all(s[x] for x in b):
            continue
        v = [c[k] * s[b[2 * k]] * s[b[2 * k + 1]] for k in range(3)]
        if v[0] == v[1] == v[2]:
            raise ValueError(f"three-term condition violated at {table.triples[t]}")
        m = next(k for k in range(3) if v.count(v[k]) == 1)
        for j in range(3):
            if j != m:
                rows.append((BfpInequality(table.triples[t], m, j), (b[2 * m], b[2 * m + 1], b[2 * j], b[2 * j + 1])))
    return rows


def _float_support(rows, nvars) -> np.ndarray | None:
    """Support of a floating-point Farkas vector, or None if the float LP finds none."""
    from scipy.optimize import linprog
    from scipy.sparse import coo_matrix

    m = len(rows)
    data, ri, ci = [], [], []
    for j, (_, (p, q, u, v)) in enumerate(rows):
        for var, val in ((p, 1), (q, 1), (u, -1), (v, -1)):
            ri.append(var)
            ci.append(j)
            data.append(val)
        ri.append(nvars)
        ci.append(j)
        data.append(1)
    A = coo_matrix((data, (ri, ci)), shape=(nvars + 1, m)).tocsr()
    b = np.zeros(nvars + 1)
    b[-1] = 1.0
    res = linprog(np.zeros(m), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    if res.status != 0:
        return None
    return np.flatnonzero(res.x > 1e-12)


def _float_log_witness(rows, nvars) -> list[Fraction] | None:
    """Rational x with every row strictly positive, checked exactly."""
    from scipy.optimize import linprog
    from scipy.sparse import coo_matrix

    data, ri, ci = [], [], []
    for j, (_, (p, q, u, v)) in enumerate(rows):
        for var, val in ((p, -1), (q, -1), (u, 1), (v, 1)):
            ri.append(j)
            ci.append(var)
            data.append(val)
    A = coo_matrix((data, (ri, ci)), shape=(len(rows), nvars)).tocsr()
    res = linprog(np.zeros(nvars), A_ub=A, b_ub=-np.ones(len(rows)), bounds=(None, None), method="highs")
    if res.status != 0:
        return None
    x = [Fraction(round(v * 2**20), 2**20) for v in res.x]
    if all(x[p] + x[q] - x[u] - x[v] > 0 for _, (p, q, u, v) in rows):
        return x
    return None


def _support_matrix(rows, columns) -> list[list[int]]:
    """Variable-by-row incidence of the chosen rows (the Farkas system minus normalization)."""
    used = sorted({var for j in columns for var in rows[j][1]})
    pos = {v: i for i, v in enumerate(used)}
    A = [[0] * len(columns) for _ in used]
    for c, j in enumerate(columns):
        p, q, u, v = rows[j][1]
        A[pos[p]][c] += 1
        A[pos[q]][c] += 1
        A[pos[u]][c] -= 1
        A[pos[v]][c] -= 1
    return A


def _certificate(rows, columns, weights) -> BfpCertificate:
    total = sum(weights)
    picked = [(rows[j][0], Fraction(w) / total) for j, w in zip(columns, weights) if w > 0]
    return BfpCertificate(tuple(q for q, _ in picked), tuple(y for _, y in picked))


def _nullspace_certificate(rows, columns) -> BfpCertificate | None:
    """Certificate from a one-dimensional integer nullspace with single-signed basis."""
    import flint

    A = _support_matrix(rows, columns)
    basis, nullity = flint.fmpz_mat(A).nullspace()
    if nullity != 1:
        return None
    vec = [int(basis[i, 0]) for i in range(basis.nrows())]
    if all(v <= 0 for v in vec):
        vec = [-v for v in vec]
    if any(v < 0 for v in vec) or not any(vec):
        return None
    return _certificate(rows, columns, vec)


def _simplex_certificate(rows, columns) -> BfpCertificate | None:
    """Exact Farkas combination among ``columns`` by the rational simplex."""
    A = _support_matrix(rows, columns)
    A.append([1] * len(columns))
    b = [0] * (len(A) - 1) + [1]
    res = solve_feasibility(A, b)
    if not res.feasible:
        return None
    return _certificate(rows, columns, res.solution)


def _exact_certificate(rows, columns) -> BfpCertificate | None:
    return _nullspace_certificate(rows, columns) or _simplex_certificate(rows, columns)


def bfp(signs: Signs) -> BfpCertificate | None:
    """Search for a biquadratic final polynomial over the fully signed triples.

    A floating-point LP proposes either a Farkas support (then solved
    exactly) or a log-scale witness (then checked exactly); if neither
    survives exact checking the full exact LP decides.
    """
    rows = _bfp_rows(signs)
    if not rows:
        return None
    nvars = len(signs.signs)
    support = _float_support(rows, nvars)
    if support is not None and len(support):
        cert = _exact_certificate(rows, [int(j) for j in support])
        if cert is not None and verify_certificate(cert, signs):
            return cert
        log.info("float support did not yield an exact certificate; using full exact LP")
    elif _float_log_witness(rows, nvars) is not None:
        return None
    cert = _exact_certificate(rows, list(range(len(rows))))
    if cert is not None and not verify_certificate(cert, signs):
        raise AssertionError("exact LP produced a certificate that does not verify")
    return cert


def verify_certificate(cert: BfpCertificate, signs: Signs) -> bool:
    """Exact replay: cited signs match and the weighted rows cancel to 0 >= sum."""
    if not cert.inequalities or len(cert.inequalities) != len(cert.multipliers):
        return False
    index = subset_index(signs.n, signs.r)
    total: dict[tuple[int, ...], Fraction] = {}
    for q, mult in zip(cert.inequalities, cert.multipliers):
        if not isinstance(mult, Fraction) or mult <= 0:
            return False
        t = q.triple
        if len(t.lam) != signs.r - 2 or len(set(t.lam) | set(t.quad)) != signs.r + 2:
            return False
        if list(t.quad) != sorted(t.quad) or list(t.lam) != sorted(t.lam):
            return False
        if any(e < 0 or e >= signs.n for e in t.lam + t.quad):
            return False
        if not (0 <= q.minority < 3 and 0 <= q.majority < 3) or q.minority == q.majority:
            return False
        if any(b not in index for b in t.brackets):
            return False
        prods = t.products(signs)
        if 0 in prods:
            return False
        others = [prods[k] for k in range(3) if k != q.minority]
        if prods[q.minority] == others[0] or others[0] != others[1]:
            return False
        (m1, m2), (j1, j2) = q.terms()
        for var, c in ((m1, 1), (m2, 1), (j1, -1), (j2, -1)):
            total[var] = total.get(var, Fraction(0)) + c * mult
    return all(v == 0 for v in total.values())


# ---------------------------------------------------------------------------
# sphere pipeline


@dataclass
class Verdict:
    kind: str  # "no_compatible_chirotope" | "bfp_on_partial" | "bfp_on_all_completions" | "undecided"
    certificates: list[tuple[Signs, BfpCertificate]] = field(default_factory=list)
    witness: dict | None = None
    diagnostics: dict = field(default_factory=dict)


def certify_nonrealizable(s: SimplicialSphere, cap: int = 10_000, node_cap: int = 10_000_000) -> Verdict:
    """Try to prove that no polytope has boundary ``s``."""
    try:
        partial = partial_from_sphere(s)
    except InconsistentOrientation as exc:
        return Verdict("no_compatible_chirotope", witness={"kind": "inconsistent_orientation", "detail": str(exc)})
    try:
        propagated = gp_propagate(partial)
    except Contradiction as exc:
        t = exc.triple
        return Verdict("no_compatible_chirotope", witness={"kind": "contradiction", "lambda": list(t.lam), "quad": list(t.quad)})
    diag = {"known_from_faces": partial.known, "known_after_propagation": propagated.known}
    cert = bfp(propagated)
    if cert is not None:
        return Verdict("bfp_on_partial", [(propagated, cert)], diagnostics=diag)
    result = complete(propagated, cap=cap, node_cap=node_cap)
    diag.update(completions=len(result.completions), nodes=result.nodes, truncated=result.truncated)
    if result.status == "no_completion":
        return Verdict("no_compatible_chirotope", witness={"kind": "no_completion", "nodes": result.nodes}, diagnostics=diag)
    if result.truncated:
        return Verdict("undecided", diagnostics=diag)
    certs = []
    for chi in result.completions:
        c = bfp(chi)
        if c is None:
            diag["uncertified_completion"] = chi.to_text()
            return Verdict("undecided", diagnostics=diag)
        certs.append((chi, c))
    return Verdict("bfp_on_all_completions", certs, diagnostics=diag)
