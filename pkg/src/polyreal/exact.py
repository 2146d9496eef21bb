"""Rounding numeric realizations to exact rational ones and checking them.

Points on the unit sphere are rounded through the stereographic chart:
project, approximate the chart coordinates by fractions, and map back with
the inverse projection, which sends rational points to rational points on
the sphere. Everything is then re-verified in exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .core import Chirotope, RationalConfiguration, chirotope_of_points, supported_faces
from .errors import DegenerateSpan, DenominatorCapExceeded, PoleProximity
from .sphere import SimplicialSphere, partial_from_sphere, tuples_with_face

Target = Union[Chirotope, SimplicialSphere]

POLE_DISTANCE = 1e-6
SPHERE_SLACK = 1e-6


@dataclass(frozen=True)
class RationalizationParams:
    start_denominator_bound: int = 2**10
    max_denominator_bound: int = 2**60
    growth: int = 2**10

    def __post_init__(self):
        if self.start_denominator_bound > self.max_denominator_bound:
            raise ValueError("start bound exceeds max bound")
        if self.growth <= 1:
            raise ValueError("growth must exceed 1")

    def bounds(self):
        b = self.start_denominator_bound
        while b <= self.max_denominator_bound:
            yield b
            b *= self.growth


@dataclass(frozen=True)
class VerificationReport:
    all_signs_ok: bool
    facets_match: bool
    inscribed_ok: bool
    inscribed_required: bool = False
    first_failure: tuple | str | None = None

    @property
    def positive(self) -> bool:
        return self.all_signs_ok and self.facets_match and (self.inscribed_ok or not self.inscribed_required)


# ---------------------------------------------------------------------------
# stereographic projection


def stereographic(x: Sequence, pole: str = "north"):
    """Chart coordinates of a point on the unit sphere, projected from a pole."""
    *head, last = x
    den = 1 - last if pole == "north" else 1 + last
    return [h / den for h in head]


def inverse_stereographic(t: Sequence, pole: str = "north"):
    """Point on the unit sphere with chart coordinates ``t``; exact for Fractions."""
    s = sum(v * v for v in t)
    last = (s - 1) / (s + 1)
    if pole != "north":
        last = -last
    return [2 * v / (s + 1) for v in t] + [last]


def sphere_point_at_bound(x: np.ndarray, bound: int, pole: str = "north") -> tuple[Fraction, ...]:
    """Exact on-sphere rational point near ``x`` using chart denominators <= bound."""
    y = np.asarray(x, dtype=float)
    y = y / np.linalg.norm(y)
    pole_pt = np.zeros_like(y)
    pole_pt[-1] = 1.0 if pole == "north" else -1.0
    if np.linalg.norm(y - pole_pt) < POLE_DISTANCE:
        raise PoleProximity(f"point within {POLE_DISTANCE} of the {pole} pole")
    t = stereographic(list(y), pole)
    t_rat = [Fraction(float(v)).limit_denominator(bound) for v in t]
    return tuple(inverse_stereographic(t_rat, pole))


def rationalize_on_sphere(x, params: RationalizationParams | None = None, tol: float = 1e-6,
                          pole: str = "north") -> tuple[Fraction, ...]:
    """Rational point exactly on the unit sphere within ``tol`` of ``x``.

    Falls back to the south pole chart when ``x`` is near the north pole.
    """
    params = params or RationalizationParams()
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x)
    if abs(norm - 1) > SPHERE_SLACK:
        raise ValueError(f"point is {abs(norm - 1):.3g} away from the unit sphere")
    for bound in params.bounds():
        try:
            p = sphere_point_at_bound(x, bound, pole)
        except PoleProximity:
            if pole != "north":
                raise
            pole = "south"
            p = sphere_point_at_bound(x, bound, pole)
        assert sum(c * c for c in p) == 1
        if np.linalg.norm(np.array([float(c) for c in p]) - x) <= tol:
            return p
    raise DenominatorCapExceeded(f"no on-sphere point within {tol} below denominator {params.max_denominator_bound}")


def free_point_at_bound(x: np.ndarray, bound: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(float(v)).limit_denominator(bound) for v in x)


# ---------------------------------------------------------------------------
# verification


def verify(config: RationalConfiguration, target: Target, inscribed: bool = False) -> VerificationReport:
    """Exact check of a rational configuration against a chirotope or a sphere.

    Against a chirotope every determinant sign must match. Against a sphere
    the face-containing tuples must match its forced signs up to one global
    sign and the supported facets must be exactly the sphere's facets.
    """
    on_sphere = config.on_unit_sphere()
    inscribed_ok = all(on_sphere)
    first = None
    if not inscribed_ok and inscribed:
        first = ("vertex", on_sphere.index(False))
    if isinstance(target, Chirotope):
        if (config.n, config.d + 1) != (target.n, target.r):
            return VerificationReport(False, False, inscribed_ok, inscribed, "size mismatch")
        try:
            chi = chirotope_of_points(config)
        except DegenerateSpan:
            return VerificationReport(False, False, inscribed_ok, inscribed, "degenerate")
        bad = next((t for t, a, b in zip(chi.tuples(), chi.signs, target.signs) if a != b), None)
        signs_ok = bad is None
        facets_ok = signs_ok or (target.is_uniform and supported_faces(chi) == supported_faces(target))
        return VerificationReport(signs_ok, facets_ok, inscribed_ok, inscribed, bad if bad is not None else first)
    if (config.n, config.d) != (target.n, target.d):
        return VerificationReport(False, False, inscribed_ok, inscribed, "size mismatch")
    try:
        chi = chirotope_of_points(config)
    except DegenerateSpan:
        return VerificationReport(False, False, inscribed_ok, inscribed, "degenerate")
    forced = partial_from_sphere(target)
    tuples = tuples_with_face(target)
    ref = forced.sign_of(tuples[0]) * chi.sign_of(tuples[0])
    bad = next((t for t in tuples if chi.sign_of(t) * ref != forced.sign_of(t)), None)
    signs_ok = bad is None
    facets = supported_faces(chi)
    facets_ok = facets == set(target.facets)
    if signs_ok and not facets_ok:
        bad = ("facet", sorted(facets.symmetric_difference(target.facets))[0])
    return VerificationReport(signs_ok, facets_ok, inscribed_ok, inscribed, bad if bad is not None else first)


def rationalize_config(points, on_sphere: bool, target: Target, params: RationalizationParams | None = None):
    """Round a numeric configuration until the exact verification passes.

    Returns ``(configuration, report)``; raises DenominatorCapExceeded with
    the last failing report.
    """
    params = params or RationalizationParams()
    pts = np.asarray(points, dtype=float)
    report = None
    for bound in params.bounds():
        rounded = []
        for x in pts:
            if on_sphere:
                try:
                    rounded.append(sphere_point_at_bound(x, bound, "north"))
                except PoleProximity:
                    rounded.append(sphere_point_at_bound(x, bound, "south"))
            else:
                rounded.append(free_point_at_bound(x, bound))
        config = RationalConfiguration(tuple(rounded))
        report = verify(config, target, inscribed=on_sphere)
        if report.positive:
            return config, report
    raise DenominatorCapExceeded("rounded configuration never verified", report)
