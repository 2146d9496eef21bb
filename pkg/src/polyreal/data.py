"""Published instances and small generated families used as test corpora."""

from __future__ import annotations

from fractions import Fraction as F

from .core import RationalConfiguration, chirotope_of_points, facets_of
from .sphere import SimplicialSphere, load_sphere

# Bokowski-Ewald-Kleinschmidt polytope (#6986 in Lutz's numbering), inscribed.
BEK_COORDINATES = RationalConfiguration((
    (F(-20, 583), F(2, 53), F(38, 583), F(581, 583)),
    (F(-2, 17), F(16, 51), F(-10, 51), F(47, 51)),
    (F(-6, 61), F(20, 61), F(6, 61), F(57, 61)),
    (F(-5, 18), F(-1, 6), F(-1, 18), F(17, 18)),
    (F(-4, 237), F(8, 79), F(-56, 237), F(229, 237)),
    (F(10, 59), F(10, 59), F(16, 59), F(55, 59)),
    (F(4, 79), F(-80, 553), F(40, 553), F(545, 553)),
    (F(4, 27), F(-40, 189), F(-8, 63), F(181, 189)),
    (F(28, 79), F(-4, 79), F(-20, 79), F(71, 79)),
    (F(48, 221), F(32, 221), F(-12, 221), F(213, 221)),
))

BEK_FACETS = (
    "[0 1 2 3] [0 1 2 4] [0 1 3 4] [0 2 3 5] [0 2 4 9] [0 2 5 9] [0 3 4 6] [0 3 5 6] "
    "[0 4 6 7] [0 4 7 9] [0 5 6 9] [0 6 7 9] [1 2 3 8] [1 2 4 9] [1 2 5 8] [1 2 5 9] "
    "[1 3 4 8] [1 4 8 9] [1 5 8 9] [2 3 5 8] [3 4 6 7] [3 4 7 8] [3 5 6 7] [3 5 7 8] "
    "[4 7 8 9] [5 6 7 8] [5 6 8 9] [6 7 8 9]"
)

# facet -> on-sphere point stacked over it
BEK_STACKINGS = (
    ((0, 2, 5, 9), (F(2, 23), F(5, 23), F(4, 23), F(22, 23))),
    ((0, 3, 5, 6), (F(4, 203), F(-80, 609), F(8, 87), F(601, 609))),
)

# small-valence 3-sphere that is not polytopal
T2766_FACETS = (
    "[0 1 2 3] [0 1 2 4] [0 1 3 5] [0 1 4 6] [0 1 5 6] [0 2 3 4] [0 3 4 7] [0 3 5 7] "
    "[0 4 6 7] [0 5 6 8] [0 5 7 8] [0 6 7 8] [1 2 3 9] [1 2 4 8] [1 2 8 9] [1 3 5 6] "
    "[1 3 6 9] [1 4 6 9] [1 4 8 9] [2 3 4 7] [2 3 7 9] [2 4 7 8] [2 5 7 8] [2 5 7 9] "
    "[2 5 8 9] [3 5 6 9] [3 5 7 9] [4 6 7 8] [4 6 8 9] [5 6 8 9]"
)

T2775_FACETS = (
    "[0 1 2 3] [0 1 2 4] [0 1 3 5] [0 1 4 6] [0 1 5 6] [0 2 3 4] [0 3 4 7] [0 3 5 7] "
    "[0 4 6 7] [0 5 6 8] [0 5 7 8] [0 6 7 8] [1 2 3 9] [1 2 4 10] [1 2 9 10] [1 3 5 11] "
    "[1 3 9 11] [1 4 6 12] [1 4 10 12] [1 5 6 12] [1 5 11 12] [1 9 10 11] [1 10 11 12] "
    "[2 3 4 12] [2 3 9 12] [2 4 10 12] [2 9 10 13] [2 9 12 13] [2 10 12 13] [3 4 6 7] "
    "[3 4 6 12] [3 5 7 11] [3 6 7 11] [3 6 9 11] [3 6 9 12] [5 6 8 9] [5 6 9 12] "
    "[5 7 8 13] [5 7 11 13] [5 8 9 13] [5 9 12 13] [5 11 12 13] [6 7 8 11] [6 8 9 11] "
    "[7 8 11 13] [8 9 10 11] [8 9 10 13] [8 10 11 13] [10 11 12 13]"
)

# neighborly 4-dimensional candidate on 12 vertices with undecided realizability
F374225_FACETS = (
    "[0 1 4 8] [0 1 4 10] [0 1 8 9] [0 1 9 10] [0 2 3 6] [0 2 3 11] [0 2 4 9] [0 2 4 11] "
    "[0 2 6 7] [0 2 7 9] [0 3 6 7] [0 3 7 9] [0 3 9 11] [0 4 5 8] [0 4 5 9] [0 4 10 11] "
    "[0 5 8 9] [0 9 10 11] [1 2 3 4] [1 2 3 8] [1 2 4 5] [1 2 5 8] [1 3 4 11] [1 3 8 11] "
    "[1 4 5 8] [1 4 10 11] [1 6 7 9] [1 6 7 10] [1 6 8 9] [1 6 8 10] [1 7 9 10] "
    "[1 8 10 11] [2 3 4 11] [2 3 5 6] [2 3 5 10] [2 3 8 10] [2 4 5 6] [2 4 6 7] "
    "[2 4 7 9] [2 5 8 10] [3 5 6 11] [3 5 10 11] [3 6 7 11] [3 7 9 11] [3 8 10 11] "
    "[4 5 6 7] [4 5 7 9] [5 6 7 8] [5 6 8 10] [5 6 10 11] [5 7 8 9] [6 7 8 9] "
    "[6 7 10 11] [7 9 10 11]"
)


def bek_sphere() -> SimplicialSphere:
    return load_sphere(BEK_FACETS)


def t2766_sphere() -> SimplicialSphere:
    return load_sphere(T2766_FACETS)


def moment_curve(n: int, d: int, start: int = 1) -> RationalConfiguration:
    return RationalConfiguration(tuple(tuple(F(t**k) for k in range(1, d + 1)) for t in range(start, start + n)))


def cyclic_sphere(n: int, d: int) -> SimplicialSphere:
    """Boundary of the cyclic d-polytope with n vertices, from the moment curve."""
    facets = facets_of(chirotope_of_points(moment_curve(n, d)))
    return SimplicialSphere(n, d, tuple(facets))


def simplex_sphere(d: int) -> SimplicialSphere:
    """Boundary of the d-simplex."""
    n = d + 1
    return SimplicialSphere(n, d, tuple(tuple(v for v in range(n) if v != skip) for skip in range(n)))
