"""Numeric search for point configurations with prescribed orientation signs.

The sign system ``s_T * det(p_T, 1) >= eps`` is attacked by minimizing the
squared hinge penalty

    sum_T max(0, target - s_T * det_T)^2

with L-BFGS from random starts. When the points must lie on the unit
sphere they are parametrized as ``p = y / |y|``, so every iterate satisfies
the sphere equations to rounding error. The result is numeric only; exact
verification happens in :mod:`polyreal.exact`.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .core import Chirotope, r_subsets
from .errors import NotUniform
from .sphere import PartialChirotope, SimplicialSphere, partial_from_sphere, tuples_with_face

log = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-4
DEFAULT_BOUND = 1.5
SPHERE_TOL = 1e-9


@dataclass(frozen=True)
class SignConstraint:
    tuple: tuple[int, ...]
    required_sign: int
    epsilon: float = DEFAULT_EPSILON


@dataclass
class FeasibilityProblem:
    n: int
    d: int
    constraints: list[SignConstraint]
    on_sphere: bool = False
    coordinate_bound: float = DEFAULT_BOUND

    def __post_init__(self):
        if self.on_sphere and self.coordinate_bound < 1:
            raise ValueError("coordinate_bound must be >= 1 for points on the sphere")
        for c in self.constraints:
            if len(c.tuple) != self.d + 1 or not all(0 <= i < self.n for i in c.tuple):
                raise ValueError(f"constraint tuple {c.tuple} is invalid for n={self.n}, d={self.d}")
            if c.required_sign not in (-1, 1):
                raise ValueError("required sign must be nonzero")

    @property
    def sphere_equalities(self) -> int:
        return self.n if self.on_sphere else 0

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        idx = np.array([c.tuple for c in self.constraints], dtype=np.int64).reshape(-1, self.d + 1)
        sg = np.array([c.required_sign for c in self.constraints], dtype=float)
        return idx, sg


@dataclass
class Budget:
    restarts: int = 20
    iterations: int = 2000
    time_limit: float | None = None  # seconds


@dataclass
class SolveOutcome:
    status: str  # "feasible" | "budget_exhausted"
    config: np.ndarray | None  # best point found; only trustworthy when feasible
    residual: float
    restarts_used: int
    seed: int
    margin: float = float("nan")
    epsilon: float = DEFAULT_EPSILON
    history: list[float] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"


def build_full_system(chi: Chirotope, inscribed: bool, epsilon: float = DEFAULT_EPSILON,
                      coordinate_bound: float = DEFAULT_BOUND) -> FeasibilityProblem:
    """One constraint per r-subset, signs taken from ``chi``."""
    if not chi.is_uniform:
        raise NotUniform("the sign system needs a uniform chirotope")
    cons = [SignConstraint(t, s, epsilon) for t, s in zip(r_subsets(chi.n, chi.r), chi.signs)]
    return FeasibilityProblem(chi.n, chi.r - 1, cons, inscribed, coordinate_bound)


def build_face_system(sphere: SimplicialSphere, partial: PartialChirotope | None = None, inscribed: bool = False,
                      epsilon: float = DEFAULT_EPSILON, coordinate_bound: float = DEFAULT_BOUND) -> FeasibilityProblem:
    """Constraints only on r-tuples that contain a facet of ``sphere``."""
    if partial is None:
        partial = partial_from_sphere(sphere)
    cons = []
    for t in tuples_with_face(sphere):
        s = partial.sign_of(t)
        if s == 0:
            raise ValueError(f"partial chirotope leaves face tuple {t} undetermined")
        cons.append(SignConstraint(t, s, epsilon))
    return FeasibilityProblem(sphere.n, sphere.d, cons, inscribed, coordinate_bound)


# ---------------------------------------------------------------------------
# determinants and their gradients


def _minor_indices(r: int, d: int):
    rows = np.array([[k for k in range(r) if k != i] for i in range(r)])
    cols = np.array([[k for k in range(r) if k != j] for j in range(d)])
    signs = np.array([[(-1.0) ** (i + j) for j in range(d)] for i in range(r)])
    return rows, cols, signs


def dets_and_cofactors(points: np.ndarray, idx: np.ndarray):
    """Determinants of the homogenized tuples and their coordinate cofactors.

    Returns ``dets`` of shape (K,) and ``cof`` of shape (K, r, d) with
    ``cof[k, i, j] = d det_k / d points[idx[k, i], j]``.
    """
    n, d = points.shape
    r = d + 1
    hom = np.hstack([points, np.ones((n, 1))])
    mats = hom[idx]  # (K, r, r)
    dets = np.linalg.det(mats)
    rows, cols, signs = _minor_indices(r, d)
    # minors[k, i, j] removes row i and column j
    sub = mats[:, rows[:, None, :, None], cols[None, :, None, :]]  # (K, r, d, r-1, r-1)
    cof = np.linalg.det(sub) * signs
    return dets, cof


class _Objective:
    def __init__(self, problem: FeasibilityProblem, target: float, pinned: np.ndarray | None):
        self.problem = problem
        self.idx, self.sg = problem.arrays()
        self.target = target
        self.pinned = pinned

    def points(self, z: np.ndarray) -> np.ndarray:
        p = self.problem
        y = z.reshape(-1, p.d)
        if self.pinned is not None:
            y = np.vstack([self.pinned, y])
        if p.on_sphere:
            return y / np.linalg.norm(y, axis=1, keepdims=True)
        return y

    def __call__(self, z: np.ndarray):
        p = self.problem
        y = z.reshape(-1, p.d)
        if self.pinned is not None:
            y = np.vstack([self.pinned, y])
        if p.on_sphere:
            norms = np.linalg.norm(y, axis=1, keepdims=True)
            pts = y / norms
        else:
            pts = y
        dets, cof = dets_and_cofactors(pts, self.idx)
        h = np.maximum(0.0, self.target - self.sg * dets)
        value = float(h @ h)
        coef = (-2.0 * h * self.sg)[:, None, None] * cof
        grad = np.zeros_like(pts)
        np.add.at(grad, self.idx, coef)
        if p.on_sphere:
            # chain rule through y -> y / |y|
            radial = np.sum(grad * pts, axis=1, keepdims=True)
            grad = (grad - radial * pts) / norms
        if self.pinned is not None:
            grad = grad[1:]
        return value, grad.ravel()


def margins(problem: FeasibilityProblem, points: np.ndarray) -> np.ndarray:
    idx, sg = problem.arrays()
    dets, _ = dets_and_cofactors(points, idx)
    return sg * dets


def residual(problem: FeasibilityProblem, points: np.ndarray, epsilon: float | None = None) -> float:
    """Largest violation of the system at ``points``; 0 means feasible."""
    eps = np.array([c.epsilon for c in problem.constraints]) if epsilon is None else epsilon
    worst = float(np.max(eps - margins(problem, points), initial=0.0))
    if problem.on_sphere:
        dev = np.abs(np.sum(points**2, axis=1) - 1.0)
        sphere_viol = float(np.max(dev))
        if sphere_viol > SPHERE_TOL:
            worst = max(worst, sphere_viol)
    return max(worst, 0.0)


def _start(problem: FeasibilityProblem, rng: np.random.Generator, pinned) -> np.ndarray:
    n = problem.n - (1 if pinned is not None else 0)
    if problem.on_sphere:
        y = rng.standard_normal((n, problem.d))
        return (y / np.linalg.norm(y, axis=1, keepdims=True)).ravel()
    b = problem.coordinate_bound
    return rng.uniform(-b, b, size=(n, problem.d)).ravel()


def _epsilon_schedule(base: float, restart: int, restarts: int) -> float:
    """Full eps for the first half of the restarts, then halving per batch."""
    half = restarts // 2
    if restart < half:
        return base
    batch = max(1, (restarts - half) // 4)
    return base / 2 ** (1 + (restart - half) // batch)


def solve_feasibility(problem: FeasibilityProblem, budget: Budget | None = None, seed: int = 0,
                      pin_north_pole: bool = False) -> SolveOutcome:
    """Random-restart penalty minimization; deterministic in ``seed``."""
    budget = budget or Budget()
    base_eps = min((c.epsilon for c in problem.constraints), default=DEFAULT_EPSILON)
    pinned = None
    if pin_north_pole and problem.on_sphere:
        pinned = np.zeros((1, problem.d))
        pinned[0, -1] = 1.0
    start_time = time.monotonic()
    best: tuple[float, int, np.ndarray, float] | None = None
    history = []
    used = 0
    if not problem.constraints:
        rng = np.random.default_rng([seed, 0])
        pts = _Objective(problem, 0.0, pinned).points(_start(problem, rng, pinned))
        return SolveOutcome("feasible", pts, 0.0, 1, seed, float("inf"), base_eps)
    for restart in range(budget.restarts):
        if budget.time_limit is not None and time.monotonic() - start_time > budget.time_limit:
            break
        used = restart + 1
        eps = _epsilon_schedule(base_eps, restart, budget.restarts)
        rng = np.random.default_rng([seed, restart])
        obj = _Objective(problem, 2.0 * eps, pinned)
        z0 = _start(problem, rng, pinned)
        bounds = None
        if not problem.on_sphere:
            b = problem.coordinate_bound
            bounds = [(-b, b)] * z0.size
        res = minimize(obj, z0, jac=True, method="L-BFGS-B", bounds=bounds,
                       options={"maxiter": budget.iterations, "ftol": 0.0, "gtol": 1e-14})
        pts = obj.points(res.x)
        res_val = residual(problem, pts, eps)
        history.append(res_val)
        if best is None or res_val < best[0]:
            best = (res_val, restart, pts, eps)
        if res_val == 0.0:
            break
    res_val, restart, pts, eps = best if best is not None else (float("inf"), -1, None, base_eps)
    margin = float(np.min(margins(problem, pts))) if pts is not None else float("nan")
    status = "feasible" if res_val == 0.0 else "budget_exhausted"
    log.debug("solve: %s after %d restarts (residual %.3g)", status, used, res_val)
    return SolveOutcome(status, pts, res_val, used, seed, margin, eps, history)
