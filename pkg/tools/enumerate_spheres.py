"""Enumerate combinatorial 3-spheres with few vertices by bistellar flips.

Starting from the boundary of the 4-simplex, explore the flip graph
(1-4, 4-1, 2-3 and 3-2 moves) restricted to at most ``--max-vertices``
vertices and keep one representative per isomorphism class. Isomorphism is
decided by a brute-force canonical form over all vertex relabelings, which
is only practical up to about 8 vertices.

Writes one JSON line per sphere: ``{"id", "n", "d", "f_vector", "facets"}``.
"""

from __future__ import annotations

import argparse
import itertools
import json
from collections import deque
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def _perms(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64)


def canonical(facets) -> tuple[tuple[int, ...], ...]:
    """Lexicographically least relabeled sorted facet list."""
    n = 1 + max(max(f) for f in facets)
    F = np.array(sorted(facets), dtype=np.int64)
    P = _perms(n)
    relabeled = np.sort(P[:, F], axis=2)  # (K, m, 4)
    codes = relabeled @ (n ** np.arange(3, -1, -1))
    codes.sort(axis=1)
    best = min(range(len(codes)), key=lambda k: tuple(codes[k]))
    return tuple(tuple(int(v) for v in f) for f in sorted(map(tuple, relabeled[best])))


def _compact(facets):
    verts = sorted({v for f in facets for v in f})
    rank = {v: i for i, v in enumerate(verts)}
    return [tuple(sorted(rank[v] for v in f)) for f in facets]


def neighbours(facets, max_vertices: int):
    fset = set(facets)
    n = 1 + max(max(f) for f in facets)
    edges = {e for f in facets for e in itertools.combinations(f, 2)}
    triangles = {t for f in facets for t in itertools.combinations(f, 3)}
    # 1-4: subdivide a facet
    if n < max_vertices:
        for f in facets:
            rest = [g for g in facets if g != f]
            yield rest + [tuple(sorted(set(t) | {n})) for t in itertools.combinations(f, 3)]
    # 4-1: remove a vertex whose link is a tetrahedron boundary
    if n > 5:
        for v in range(n):
            star = [f for f in facets if v in f]
            if len(star) == 4:
                link = tuple(sorted({u for f in star for u in f} - {v}))
                if len(link) == 4 and link not in fset:
                    yield _compact([f for f in facets if v not in f] + [link])
    # 2-3: triangle abc with apexes x, y and xy not an edge
    for t in triangles:
        pair = [f for f in facets if set(t) <= set(f)]
        x, y = (next(iter(set(f) - set(t))) for f in pair)
        if tuple(sorted((x, y))) in edges:
            continue
        rest = [f for f in facets if f not in pair]
        yield rest + [tuple(sorted(set(e) | {x, y})) for e in itertools.combinations(t, 2)]
    # 3-2: edge xy of degree 3 whose link triangle is not a face
    for e in edges:
        star = [f for f in facets if set(e) <= set(f)]
        if len(star) != 3:
            continue
        link = tuple(sorted({u for f in star for u in f} - set(e)))
        if len(link) != 3 or link in triangles:
            continue
        rest = [f for f in facets if f not in star]
        yield rest + [tuple(sorted(set(link) | {v})) for v in e]


def f_vector(facets):
    out = []
    for k in range(1, 5):
        out.append(len({s for f in facets for s in itertools.combinations(f, k)}))
    return tuple(out)


def enumerate_spheres(max_vertices: int):
    start = canonical([tuple(c) for c in itertools.combinations(range(5), 4)])
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for nb in neighbours(list(cur), max_vertices):
            c = canonical(nb)
            if c not in seen:
                seen.add(c)
                queue.append(c)
    return sorted(seen, key=lambda s: (1 + max(max(f) for f in s), f_vector(s), s))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-vertices", type=int, default=8)
    ap.add_argument("--only", type=int, default=None, help="emit only spheres with this many vertices")
    ap.add_argument("-o", "--output", default="-")
    args = ap.parse_args(argv)
    spheres = enumerate_spheres(args.max_vertices)
    lines = []
    for i, s in enumerate(spheres):
        n = 1 + max(max(f) for f in s)
        if args.only is not None and n != args.only:
            continue
        lines.append(json.dumps({"id": f"S{n}_{i}", "n": n, "d": 4, "f_vector": list(f_vector(s)),
                                 "facets": [list(f) for f in s]}))
    text = "\n".join(lines) + "\n"
    if args.output == "-":
        print(text, end="")
    else:
        with open(args.output, "w") as fh:
            fh.write(text)


if __name__ == "__main__":
    main()
