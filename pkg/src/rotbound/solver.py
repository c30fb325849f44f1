"""Certified global optimization over rotation space by branch and bound.

The search domain is the axis-angle cube [-pi, pi]^3 intersected with the
closed pi-ball, subdivided octree-style. The bounding device is the metric
bound |r - c| >= d(exp r, exp c): no rotation inside a cube of half-width s
is angularly farther than sqrt(3)*s from the center rotation, so residuals
that are 1-Lipschitz in the angular metric admit a per-cube lower bound
evaluated at the center alone. Best-first expansion with an incumbent from
center evaluations yields a certified optimality gap.
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .rotations import (
    AxisAngle,
    RotationMatrix,
    RotationParseError,
    _rodrigues,
    as_matrix,
    log_map,
    parse_rotation_line,
)

SQRT3 = math.sqrt(3.0)
BALL_RADIUS = math.pi

AGGREGATORS = ("linf", "l1", "l2sq")

DEFAULT_MAX_CUBES = 10_000_000


@dataclass
class Cube:
    """An octree cell of the search domain.

    half_width is pi / 2^depth; lower_bound is the best known bound on the
    objective over the cell (set by the solver after evaluation, -inf until
    then). Cells that miss the closed pi-ball are never constructed.
    """

    center: np.ndarray
    half_width: float
    lower_bound: float = -math.inf
    depth: int = 0


@dataclass(frozen=True)
class Problem:
    """An objective over rotations: nonnegative angular residuals plus an aggregator.

    aggregator is one of 'linf' (max residual), 'l1' (sum), 'l2sq' (sum of
    squares). Contract on residual_fn, documented but not checked: each
    residual is 1-Lipschitz with respect to the angular metric,
    |theta_i(R) - theta_i(S)| <= d(R, S). That is exactly what makes the
    cube lower bound sound. Built-in costs satisfy it by construction.
    """

    residual_fn: Callable[[RotationMatrix], np.ndarray]
    aggregator: str

    def __post_init__(self):
        if self.aggregator not in AGGREGATORS:
            raise ValueError(f"aggregator {self.aggregator!r} not one of {AGGREGATORS}")


@dataclass(frozen=True)
class SolverResult:
    """Outcome of a solve: incumbent, certificate, and search counters.

    gap = best_value - certified_lower_bound is nonnegative and at most the
    requested epsilon when converged is True.
    """

    best_rotation: AxisAngle
    best_value: float
    certified_lower_bound: float
    gap: float
    cubes_explored: int
    cubes_pruned: int
    converged: bool


def angular_residuals(rotations) -> Callable[[RotationMatrix], np.ndarray]:
    """Residual function measuring angular distance to each input rotation.

    Accepts matrices or axis-angle vectors. The returned function is
    1-Lipschitz per term (triangle inequality of the metric), so it is a
    valid Problem residual_fn.
    """
    mats = [as_matrix(r).m for r in rotations]
    if not mats:
        raise ValueError("need at least one rotation")
    stack = np.stack(mats).reshape(len(mats), 9)
    stack.flags.writeable = False

    def residuals(rot: RotationMatrix) -> np.ndarray:
        c = (stack @ rot.m.reshape(9) - 1.0) / 2.0
        return np.arccos(np.clip(c, -1.0, 1.0))

    return residuals


def averaging_problem(rotations, aggregator: str) -> Problem:
    """Rotation-averaging objective: aggregate angular distances to the inputs."""
    return Problem(residual_fn=angular_residuals(rotations), aggregator=aggregator)


def cube_uncertainty(cube: Cube) -> float:
    """Half-diagonal sqrt(3)*half_width: no point of the cube is farther than
    this from the center, in vector norm and hence in angular distance."""
    return SQRT3 * cube.half_width


def _clamp_to_ball(center: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(center))
    if n <= BALL_RADIUS:
        return center
    return center * (BALL_RADIUS / n)


def _aggregate(values: np.ndarray, aggregator: str) -> float:
    if aggregator == "linf":
        return float(values.max())
    if aggregator == "l1":
        return float(values.sum())
    return float((values * values).sum())


def _residuals_at(problem: Problem, point: np.ndarray) -> np.ndarray:
    rot = RotationMatrix._from_trusted(_rodrigues(point[0], point[1], point[2]))
    return np.asarray(problem.residual_fn(rot), dtype=float)


def lower_bound(problem: Problem, cube: Cube) -> float:
    """Certified lower bound on the objective over cube intersect ball.

    Per-term bound max(0, theta_i(center) - sqrt(3)*half_width), squared
    before summing for l2sq. The center is clamped into the ball first;
    projection onto a convex set is nonexpansive, so the clamped center is
    still within cube_uncertainty of every feasible point.
    """
    th = _residuals_at(problem, _clamp_to_ball(cube.center))
    terms = np.maximum(0.0, th - cube_uncertainty(cube))
    return _aggregate(terms, problem.aggregator)


def upper_bound(problem: Problem, cube: Cube):
    """Exact objective at the (ball-clamped) cube center.

    Returns (value, AxisAngle of the evaluated point): any feasible point is
    an upper bound on the minimum.
    """
    point = _clamp_to_ball(cube.center)
    th = _residuals_at(problem, point)
    return _aggregate(th, problem.aggregator), AxisAngle(point)


_CHILD_OFFSETS = np.array(
    [(sx, sy, sz) for sx in (-1.0, 1.0) for sy in (-1.0, 1.0) for sz in (-1.0, 1.0)]
)


def subdivide(cube: Cube) -> list:
    """Split a cube into its octants, dropping octants outside the pi-ball.

    Children inherit the parent's lower_bound (valid for any subset) until
    the solver computes their own. The nearest-point test keeps every child
    that intersects the closed ball, so the retained children cover
    parent intersect ball exactly.
    """
    h = cube.half_width * 0.5
    centers = cube.center + _CHILD_OFFSETS * h
    nearest = np.linalg.norm(np.maximum(np.abs(centers) - h, 0.0), axis=1)
    return [
        Cube(center=c, half_width=h, lower_bound=cube.lower_bound, depth=cube.depth + 1)
        for c, keep in zip(centers, nearest <= BALL_RADIUS)
        if keep
    ]


def _evaluate(problem: Problem, cube: Cube):
    # One residual evaluation serves both bounds.
    point = _clamp_to_ball(cube.center)
    th = _residuals_at(problem, point)
    lb = _aggregate(np.maximum(0.0, th - cube_uncertainty(cube)), problem.aggregator)
    ub = _aggregate(th, problem.aggregator)
    return lb, ub, point


def _pattern_polish(problem: Problem, point: np.ndarray, value: float, max_evals: int = 1000):
    # Deterministic axis-aligned pattern search; strictly improving steps only.
    point = point.copy()
    step = 1e-2
    evals = 0
    while step > 1e-8 and evals < max_evals:
        moved = False
        for axis in range(3):
            for sign in (1.0, -1.0):
                cand = point.copy()
                cand[axis] += sign * step
                cand = _clamp_to_ball(cand)
                v = _aggregate(_residuals_at(problem, cand), problem.aggregator)
                evals += 1
                if v < value:
                    value, point, moved = v, cand, True
        if not moved:
            step *= 0.5
    return value, point


def solve(
    problem: Problem,
    epsilon: float,
    max_cubes: int = DEFAULT_MAX_CUBES,
    *,
    threads: int = 1,
    polish: bool = False,
) -> SolverResult:
    """Best-first branch and bound to a certified gap of at most epsilon.

    The frontier is a min-heap on lower_bound with insertion-order
    tie-breaking. Expansion pops the best cube, subdivides, evaluates the
    children, and updates the incumbent from their center values. The run is
    one sequential loop whatever the thread count: threads > 1 only spreads
    the per-child evaluations of a single expansion across a pool with
    order-preserving collection, so results and counters are identical to
    the single-threaded reference. Terminates when best incumbent minus the
    smallest frontier bound is at most epsilon, when the frontier empties
    (gap exactly 0), or when max_cubes evaluations are exhausted (converged
    False, achieved gap reported).
    """
    if epsilon <= 0.0:
        raise ValueError(f"epsilon={epsilon!r} must be positive")
    if max_cubes < 1:
        raise ValueError(f"max_cubes={max_cubes!r} must be at least 1")
    if threads < 1:
        raise ValueError(f"threads={threads!r} must be at least 1")

    root = Cube(center=np.zeros(3), half_width=BALL_RADIUS, depth=0)
    lb, ub, point = _evaluate(problem, root)
    root.lower_bound = lb
    best_value = ub
    best_point = point
    explored = 1
    pruned = 0
    heap = [(root.lower_bound, 0, root)]
    counter = 1
    certified = root.lower_bound
    converged = False

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while heap:
            if explored >= max_cubes:
                certified = heap[0][0]
                break
            top_lb, _, cube = heapq.heappop(heap)
            if best_value - top_lb <= epsilon:
                certified = top_lb
                converged = True
                break
            if top_lb >= best_value:
                pruned += 1
                continue
            children = subdivide(cube)
            pruned += 8 - len(children)
            if pool is not None:
                results = list(pool.map(lambda ch: _evaluate(problem, ch), children))
            else:
                results = [_evaluate(problem, ch) for ch in children]
            for child, (clb, cub, cpt) in zip(children, results):
                explored += 1
                # Parent's bound stays valid for the child; keep the tighter one.
                child.lower_bound = max(clb, cube.lower_bound)
                if cub < best_value:
                    best_value = cub
                    best_point = cpt
                if child.lower_bound >= best_value:
                    pruned += 1
                else:
                    heapq.heappush(heap, (child.lower_bound, counter, child))
                    counter += 1
        else:
            # Frontier exhausted: every region was pruned against the final
            # incumbent, so the incumbent is the global minimum.
            certified = best_value
            converged = True
    finally:
        if pool is not None:
            pool.shutdown()

    if polish:
        best_value, best_point = _pattern_polish(problem, best_point, best_value)

    certified = min(certified, best_value)
    gap = best_value - certified
    return SolverResult(
        best_rotation=AxisAngle(best_point),
        best_value=best_value,
        certified_lower_bound=certified,
        gap=gap,
        cubes_explored=explored,
        cubes_pruned=pruned,
        converged=converged,
    )


@dataclass(frozen=True)
class ProblemFile:
    """Parsed problem input: rotations plus optional cost header and ground truth."""

    rotations: list
    cost: Optional[str] = None
    truth: Optional[AxisAngle] = None


def read_problem_file(text: str) -> ProblemFile:
    """Parse a problem file: rotation lines plus `# cost:` and `# truth:` comments.

    Rotation lines hold 3 numbers (axis-angle) or 9 (row-major matrix);
    other `#` comments and blank lines are ignored. Errors carry the
    1-based line number.
    """
    rotations = []
    cost = None
    truth = None
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("cost:"):
                value = body[len("cost:"):].strip()
                if value not in AGGREGATORS:
                    raise RotationParseError(f"unknown cost {value!r}", i)
                cost = value
            elif body.startswith("truth:"):
                fields = body[len("truth:"):].split()
                try:
                    truth = AxisAngle([float(f) for f in fields])
                except ValueError as e:
                    raise RotationParseError(str(e), i) from None
            continue
        rotations.append(as_matrix(parse_rotation_line(line, line_number=i)))
    return ProblemFile(rotations=rotations, cost=cost, truth=truth)


def write_problem_file(stream, rotations, cost: str, truth: Optional[AxisAngle] = None) -> None:
    """Write a problem file in the text format read_problem_file parses."""
    if cost not in AGGREGATORS:
        raise ValueError(f"unknown cost {cost!r}")
    stream.write(f"# cost: {cost}\n")
    if truth is not None:
        stream.write("# truth: " + " ".join(f"{v:.17g}" for v in truth.r) + "\n")
    for rot in rotations:
        r = rot if isinstance(rot, AxisAngle) else log_map(as_matrix(rot))
        stream.write(" ".join(f"{v:.17g}" for v in r.r) + "\n")


def format_result_line(result: SolverResult) -> str:
    """One-line result: value lower_bound gap rx ry rz cubes_explored."""
    rx, ry, rz = result.best_rotation.r
    numbers = (result.best_value, result.certified_lower_bound, result.gap, rx, ry, rz)
    return " ".join(f"{v:.17g}" for v in numbers) + f" {result.cubes_explored}"
