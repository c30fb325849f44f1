"""The angular-distance bound d(R_A, R_B) <= |r_A - r_B| as executable numerics.

Everything here certifies one inequality and the chain of identities behind
it: the closed form for the angle of a composed rotation, its half-angle
reparameterization, the matching reparameterization of the vector norm, and
the convexity of arccos-squared that ties the two sides together. Sweep
helpers evaluate the inequality over random and boundary-stratified pairs;
certificate helpers exhaustively grid the convexity claim.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .rotations import (
    Angle,
    AxisAngle,
    _exp_matrices,
    _random_unit_vectors,
    _relative_angles,
    angular_distance,
    exp_map,
)

SLACK_TOL = 1e-9
EQUALITY_TOL = 1e-12
CONVEXITY_TOL = 1e-12

_PI = math.pi


def _clamped_acos(x: float) -> float:
    # Drift at equality cases would otherwise step outside acos's domain.
    return math.acos(min(1.0, max(-1.0, x)))


def _fold(v: float) -> Angle:
    """Fold an angle in [0, 2pi] into [0, pi] by min(v, 2pi - v)."""
    return Angle(min(v, 2.0 * _PI - v))


def composed_angle_closed_form(alpha, beta, phi) -> Angle:
    """Angle of the composition of rotations by alpha and beta about axes phi apart.

    Closed form 2*arccos(cos(alpha/2)cos(beta/2) - sin(alpha/2)sin(beta/2)cos(phi)),
    folded into [0, pi] so it agrees with the angle of the matrix product.
    """
    alpha, beta, phi = Angle(alpha), Angle(beta), Angle(phi)
    ha = 0.5 * alpha
    hb = 0.5 * beta
    c = math.cos(ha) * math.cos(hb) - math.sin(ha) * math.sin(hb) * math.cos(phi)
    return _fold(2.0 * _clamped_acos(c))


@dataclass(frozen=True)
class HalfAngleParams:
    """Half-angle coordinates: a_hat = alpha/2, b_hat = beta/2, d = (1 - cos phi)/2.

    Valid for alpha, beta, phi in [0, pi], giving a_hat, b_hat in [0, pi/2]
    and d in [0, 1]. Downstream identities assume this domain and do not
    extrapolate outside it.
    """

    a_hat: float
    b_hat: float
    d: float

    def __post_init__(self):
        for name, v, hi in (("a_hat", self.a_hat, _PI / 2), ("b_hat", self.b_hat, _PI / 2), ("d", self.d, 1.0)):
            if not -1e-12 <= v <= hi + 1e-12:
                raise ValueError(f"{name}={v!r} outside [0, {hi}]")

    @classmethod
    def from_angles(cls, alpha, beta, phi) -> "HalfAngleParams":
        alpha, beta, phi = Angle(alpha), Angle(beta), Angle(phi)
        return cls(0.5 * alpha, 0.5 * beta, 0.5 * (1.0 - math.cos(phi)))


def reparam_lhs(p: HalfAngleParams) -> Angle:
    """Left side in half-angle form: 2*arccos(d*cos(a_hat - b_hat) + (1-d)*cos(a_hat + b_hat))."""
    c = p.d * math.cos(p.a_hat - p.b_hat) + (1.0 - p.d) * math.cos(p.a_hat + p.b_hat)
    return _fold(2.0 * _clamped_acos(c))


def reparam_rhs(p: HalfAngleParams) -> float:
    """Right side in half-angle form: 2*sqrt(d*(a_hat - b_hat)^2 + (1-d)*(a_hat + b_hat)^2).

    Equals the vector norm |r_A - (-r_B)| for any axis pair realizing
    phi = arccos(1 - 2d).
    """
    a = p.a_hat - p.b_hat
    b = p.a_hat + p.b_hat
    return 2.0 * math.sqrt(p.d * a * a + (1.0 - p.d) * b * b)


@dataclass(frozen=True)
class SlackReport:
    """One inequality evaluation: slack = rhs - lhs, nonnegative up to 1e-9."""

    lhs: float
    rhs: float
    slack: float


def inequality_lhs(r_a: AxisAngle, r_b: AxisAngle) -> Angle:
    """Angular distance between the rotations the two vectors exponentiate to."""
    return angular_distance(exp_map(r_a), exp_map(r_b))


def inequality_rhs(r_a: AxisAngle, r_b: AxisAngle) -> float:
    """Euclidean distance between the axis-angle vectors themselves."""
    return float(np.linalg.norm(r_a.r - r_b.r))


def inequality_slack(r_a: AxisAngle, r_b: AxisAngle) -> SlackReport:
    """Evaluate the bound d(exp r_A, exp r_B) <= |r_A - r_B| at one pair."""
    lhs = inequality_lhs(r_a, r_b)
    rhs = inequality_rhs(r_a, r_b)
    return SlackReport(lhs=float(lhs), rhs=rhs, slack=rhs - float(lhs))


def composed_form_slack(r_a: AxisAngle, r_b: AxisAngle) -> SlackReport:
    """The bound with the second rotation inverted: angle of the composed
    rotation against |r_A + r_B|. Identical to inequality_slack(r_A, -r_B)."""
    return inequality_slack(r_a, -r_b)


def arccos_sq(x) -> float:
    """arccos(x) squared, with the argument clamped to [-1, 1]."""
    return _clamped_acos(float(x)) ** 2


def arccos_sq_second_derivative(x) -> float:
    """Second derivative of arccos-squared on [0, 1).

    (2*sqrt(1 - x^2) - 2*x*arccos(x)) / (1 - x^2)^(3/2). At x = 1 the
    expression is 0/0 and is deliberately not evaluated; the one-sided limit
    is 2/3 but no value is assigned here.
    """
    x = float(x)
    if not 0.0 <= x < 1.0:
        raise ValueError(f"x={x!r} outside [0, 1)")
    one_minus = 1.0 - x * x
    num = 2.0 * math.sqrt(one_minus) - 2.0 * x * math.acos(x)
    return num / one_minus**1.5


@dataclass(frozen=True)
class ConvexityReport:
    """Result of gridding the chord inequality for arccos-squared over [0,1]^3."""

    grid_size: int
    max_violation: float
    worst: tuple
    passed: bool


def _violation_slice(xs: np.ndarray, fx: np.ndarray, d: float) -> np.ndarray:
    # Chord inequality at fixed d: arccos_sq(d*x + (1-d)*y) - d*f(x) - (1-d)*f(y).
    # Row index runs over x, column over y. The d*x + (1-d)*y form makes the
    # d = 0 and d = 1 endpoints exact zeros in floating point.
    arg = d * xs[:, None] + (1.0 - d) * xs[None, :]
    chord = d * fx[:, None] + (1.0 - d) * fx[None, :]
    return np.arccos(np.clip(arg, -1.0, 1.0)) ** 2 - chord


def convexity_certificate(grid_size: int = 101) -> ConvexityReport:
    """Evaluate the chord inequality on every (x, y, d) triple of a uniform grid.

    Passes when the maximum violation is at most 1e-12; the true violation is
    never positive, so anything above rounding noise falsifies the
    implementation rather than the inequality.
    """
    if grid_size < 2:
        raise ValueError(f"grid_size={grid_size!r} must be at least 2")
    xs = np.linspace(0.0, 1.0, grid_size)
    fx = np.arccos(xs) ** 2
    max_violation = -math.inf
    worst = (0.0, 0.0, 0.0)
    for d in xs:
        viol = _violation_slice(xs, fx, float(d))
        k = int(np.argmax(viol))
        v = float(viol.flat[k])
        if v > max_violation:
            max_violation = v
            i, j = divmod(k, grid_size)
            worst = (float(xs[i]), float(xs[j]), float(d))
    return ConvexityReport(
        grid_size=grid_size,
        max_violation=max_violation,
        worst=worst,
        passed=max_violation <= CONVEXITY_TOL,
    )


@dataclass(frozen=True)
class DerivativeReport:
    """Finite-difference agreement and sign scan for the second derivative."""

    max_fd_deviation: float
    min_value: float
    passed: bool


def second_derivative_check(
    *,
    step: float = 0.01,
    upper: float = 0.99,
    fd_step: float = 1e-5,
    tol: float = 1e-4,
    scan_upper: float = 1.0 - 1e-6,
    scan_points: int = 1001,
) -> DerivativeReport:
    """Check the closed-form second derivative two ways.

    Central finite differences of arccos_sq with the given step must agree
    within tol on [0, upper]; the formula itself must be nonnegative on
    [0, scan_upper]. The scan stops short of 1 where the formula is 0/0.
    """
    max_dev = 0.0
    x = 0.0
    while x <= upper + 1e-12:
        fd = (arccos_sq(x + fd_step) - 2.0 * arccos_sq(x) + arccos_sq(x - fd_step)) / (fd_step * fd_step)
        max_dev = max(max_dev, abs(arccos_sq_second_derivative(x) - fd))
        x += step
    scan = np.linspace(0.0, scan_upper, scan_points)
    min_value = min(arccos_sq_second_derivative(float(v)) for v in scan)
    return DerivativeReport(
        max_fd_deviation=max_dev,
        min_value=min_value,
        passed=max_dev <= tol and min_value >= 0.0,
    )


@dataclass(frozen=True)
class SweepResult:
    """Columns of an inequality sweep; one row per evaluated pair."""

    alpha: np.ndarray
    beta: np.ndarray
    phi: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    slack: np.ndarray

    def __len__(self):
        return self.alpha.shape[0]

    @property
    def min_slack(self) -> float:
        return float(self.slack.min())

    @property
    def max_abs_slack(self) -> float:
        return float(np.abs(self.slack).max())

    @classmethod
    def concat(cls, parts) -> "SweepResult":
        return cls(*(np.concatenate([getattr(p, f) for p in parts]) for f in ("alpha", "beta", "phi", "lhs", "rhs", "slack")))


def _sweep_from_vectors(ra: np.ndarray, rb: np.ndarray) -> SweepResult:
    # Batch-evaluate the inequality for paired rows of two (n, 3) arrays.
    alpha = np.linalg.norm(ra, axis=1)
    beta = np.linalg.norm(rb, axis=1)
    axa = np.zeros_like(ra)
    axb = np.zeros_like(rb)
    np.divide(ra, alpha[:, None], out=axa, where=alpha[:, None] > 0.0)
    np.divide(rb, beta[:, None], out=axb, where=beta[:, None] > 0.0)
    phi = np.arccos(np.clip(np.einsum("ij,ij->i", axa, axb), -1.0, 1.0))
    lhs = _relative_angles(_exp_matrices(ra), _exp_matrices(rb))
    rhs = np.linalg.norm(ra - rb, axis=1)
    return SweepResult(alpha=alpha, beta=beta, phi=phi, lhs=lhs, rhs=rhs, slack=rhs - lhs)


def _random_pair_chunk(seed_seq: np.random.SeedSequence, count: int) -> SweepResult:
    # Draw order (alphas, betas, axes A, axes B) is part of the golden-file
    # contract; do not reorder.
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    alpha = rng.uniform(0.0, _PI, count)
    beta = rng.uniform(0.0, _PI, count)
    axa = _random_unit_vectors(count, rng)
    axb = _random_unit_vectors(count, rng)
    return _sweep_from_vectors(alpha[:, None] * axa, beta[:, None] * axb)


def random_pair_sweep(samples: int, seed: int, *, threads: int = 1, chunk_size: int = 1 << 16) -> SweepResult:
    """Evaluate the inequality on `samples` seeded random pairs.

    Angles are uniform on [0, pi], axes uniform on the sphere. Work is
    partitioned into fixed-size chunks with independently spawned generator
    states and merged in chunk order, so the result is identical for any
    thread count.
    """
    if samples < 1:
        raise ValueError(f"samples={samples!r} must be at least 1")
    counts = [chunk_size] * (samples // chunk_size)
    if samples % chunk_size:
        counts.append(samples % chunk_size)
    seeds = np.random.SeedSequence([seed, 0]).spawn(len(counts))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_random_pair_chunk, seeds, counts))
    else:
        parts = [_random_pair_chunk(s, c) for s, c in zip(seeds, counts)]
    return SweepResult.concat(parts)


# Fixed exact pairs exercising every boundary case the strata sample around.
_FIXED_PAIRS = (
    ((0.0, 0.0, 0.0), (0.0, 0.0, 0.0)),
    ((_PI, 0.0, 0.0), (_PI, 0.0, 0.0)),
    ((_PI, 0.0, 0.0), (-_PI, 0.0, 0.0)),
    ((_PI / 2, 0.0, 0.0), (0.0, _PI / 2, 0.0)),
    ((1.0, 0.0, 0.0), (0.25, 0.0, 0.0)),
    ((_PI, 0.0, 0.0), (0.0, _PI, 0.0)),
    ((0.0, 0.0, 0.0), (0.0, 0.0, _PI)),
)


def boundary_strata_sweep(seed: int, per_stratum: int = 2000) -> dict:
    """Stratified boundary suite: coaxial, antipodal-axis, and ball-boundary pairs.

    The coaxial stratum keeps the angle gap in [0.01, 0.5] so the matrix
    route resolves the relative angle well below the 1e-12 equality
    tolerance (arccos conditioning degrades as the gap approaches 0). A
    small fixed suite of exact pairs covers the corners, including gap
    values outside that window.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 1])))
    out = {}

    axes = _random_unit_vectors(per_stratum, rng)
    gap = rng.uniform(0.01, 0.5, per_stratum)
    alpha = gap + rng.uniform(0.0, 1.0, per_stratum) * (_PI - gap)
    beta = alpha - gap
    out["coaxial"] = _sweep_from_vectors(alpha[:, None] * axes, beta[:, None] * axes)

    axes = _random_unit_vectors(per_stratum, rng)
    alpha = rng.uniform(0.0, _PI, per_stratum)
    beta = rng.uniform(0.0, _PI, per_stratum)
    out["antipodal"] = _sweep_from_vectors(alpha[:, None] * axes, beta[:, None] * (-axes))

    axa = _random_unit_vectors(per_stratum, rng)
    axb = _random_unit_vectors(per_stratum, rng)
    out["ball_boundary"] = _sweep_from_vectors(_PI * axa, _PI * axb)

    ra = np.array([p[0] for p in _FIXED_PAIRS])
    rb = np.array([p[1] for p in _FIXED_PAIRS])
    out["fixed"] = _sweep_from_vectors(ra, rb)
    return out


def certification_sweep(samples: int, seed: int, *, threads: int = 1):
    """Random sweep plus the boundary strata, merged for CSV export.

    Returns (merged SweepResult, strata dict). The merged row order is the
    random chunks followed by coaxial, antipodal, ball_boundary, fixed.
    """
    random_part = random_pair_sweep(samples, seed, threads=threads)
    strata = boundary_strata_sweep(seed)
    merged = SweepResult.concat([random_part] + [strata[k] for k in ("coaxial", "antipodal", "ball_boundary", "fixed")])
    return merged, strata


def write_sweep_csv(result: SweepResult, stream) -> None:
    """Write sweep rows as CSV with header alpha,beta,phi,lhs,rhs,slack."""
    stream.write("alpha,beta,phi,lhs,rhs,slack\n")
    cols = (result.alpha, result.beta, result.phi, result.lhs, result.rhs, result.slack)
    for row in zip(*cols):
        stream.write(",".join(f"{v:.17g}" for v in row) + "\n")


def write_convexity_csv(grid_size: int, stream) -> ConvexityReport:
    """Write every grid violation as CSV x,y,d,violation rows.

    Ends with the one-line summary max_violation=<value> and returns the
    matching report. Rows are ordered d-major, then x, then y.
    """
    if grid_size < 2:
        raise ValueError(f"grid_size={grid_size!r} must be at least 2")
    xs = np.linspace(0.0, 1.0, grid_size)
    fx = np.arccos(xs) ** 2
    stream.write("x,y,d,violation\n")
    max_violation = -math.inf
    worst = (0.0, 0.0, 0.0)
    for d in xs:
        viol = _violation_slice(xs, fx, float(d))
        k = int(np.argmax(viol))
        v = float(viol.flat[k])
        if v > max_violation:
            max_violation = v
            i, j = divmod(k, grid_size)
            worst = (float(xs[i]), float(xs[j]), float(d))
        d_text = f"{d:.17g}"
        for i, x in enumerate(xs):
            x_text = f"{x:.17g}"
            row = viol[i]
            for j, y in enumerate(xs):
                stream.write(f"{x_text},{y:.17g},{d_text},{row[j]:.17g}\n")
    stream.write(f"max_violation={max_violation:.17g}\n")
    return ConvexityReport(
        grid_size=grid_size,
        max_violation=max_violation,
        worst=worst,
        passed=max_violation <= CONVEXITY_TOL,
    )
