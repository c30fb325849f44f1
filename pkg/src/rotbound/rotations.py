"""Rotation representations and the angular metric on SO(3).

Two interchangeable representations: validated 3x3 rotation matrices and
axis-angle vectors confined to the closed ball of radius pi. The angular
metric d(A, B) is the rotation angle of the relative rotation B^-1 A.
"""

from __future__ import annotations

import math

import numpy as np

ORTHONORMALITY_TOL = 1e-9
DETERMINANT_TOL = 1e-9
BALL_TOL = 1e-12
UNIT_TOL = 1e-9

# Below this angle the sin(theta) division in log_map is replaced by its series.
_SMALL_ANGLE = 1e-4
# Above this angle the skew part is too weak to carry the axis; switch to the
# symmetric-part recovery.
_NEAR_PI = math.pi - 1e-5
# Skew vector shorter than this cannot resolve the axis sign; fall back to the
# canonical orientation (first nonzero component positive).
_SIGN_TOL = 1e-9

_EYE = np.eye(3)
_EYE.flags.writeable = False


class Angle(float):
    """A rotation angle in radians, restricted to [0, pi].

    This is the output range of the angular metric: every relative rotation
    has a unique angle in [0, pi]. Construction rejects values outside the
    interval (a slop of 1e-12 above pi is folded back to pi, so downstream
    arithmetic that lands epsilon past the boundary still constructs).
    """

    __slots__ = ()

    def __new__(cls, value):
        v = float(value)
        if not 0.0 <= v <= math.pi + 1e-12:
            raise ValueError(f"angle {v!r} outside [0, pi]")
        return super().__new__(cls, min(v, math.pi))

    def __repr__(self):
        return f"Angle({float(self)!r})"


class RotationMatrix:
    """A 3x3 rotation matrix, validated at construction.

    Checks max |M^T M - I| <= 1e-9 and |det - 1| <= 1e-9, then freezes the
    array. Instances are immutable and safe to share across threads.
    """

    __slots__ = ("m",)

    def __init__(self, m):
        m = np.array(m, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
        err = np.abs(m.T @ m - _EYE).max()
        if err > ORTHONORMALITY_TOL:
            raise ValueError(f"matrix is not orthonormal (max deviation {err:.3e})")
        det = float(np.linalg.det(m))
        if abs(det - 1.0) > DETERMINANT_TOL:
            raise ValueError(f"matrix determinant {det!r} is not 1")
        m.flags.writeable = False
        object.__setattr__(self, "m", m)

    def __setattr__(self, name, value):
        raise AttributeError("RotationMatrix is immutable")

    def __repr__(self):
        rows = ", ".join("[" + ", ".join(f"{v:.6g}" for v in row) + "]" for row in self.m)
        return f"RotationMatrix([{rows}])"

    @classmethod
    def identity(cls):
        return cls(_EYE)

    @classmethod
    def _from_trusted(cls, m: np.ndarray):
        # Skips validation. Only for matrices that are orthonormal by
        # construction (outputs of the exponential map); hot paths depend on it.
        m.flags.writeable = False
        obj = object.__new__(cls)
        object.__setattr__(obj, "m", m)
        return obj


class AxisAngle:
    """An axis-angle vector r = angle * unit_axis in the closed ball |r| <= pi.

    The zero vector is the identity. Instances are immutable; the ball
    constraint is enforced at construction with a 1e-12 slop for rounding.
    """

    __slots__ = ("r",)

    def __init__(self, r):
        r = np.array(r, dtype=float).reshape(-1)
        if r.shape != (3,):
            raise ValueError(f"expected a 3-vector, got shape {r.shape}")
        n = float(np.linalg.norm(r))
        if n > math.pi + BALL_TOL:
            raise ValueError(f"axis-angle norm {n!r} exceeds pi")
        r.flags.writeable = False
        object.__setattr__(self, "r", r)

    def __setattr__(self, name, value):
        raise AttributeError("AxisAngle is immutable")

    @property
    def angle(self) -> float:
        return float(np.linalg.norm(self.r))

    def __neg__(self):
        return AxisAngle(-self.r)

    def __repr__(self):
        x, y, z = self.r
        return f"AxisAngle([{x!r}, {y!r}, {z!r}])"


def _rodrigues(x: float, y: float, z: float) -> np.ndarray:
    # Scalar Rodrigues formula; returns a plain array without wrapper overhead.
    theta = math.sqrt(x * x + y * y + z * z)
    if theta == 0.0:
        return np.eye(3)
    ax, ay, az = x / theta, y / theta, z / theta
    c = math.cos(theta)
    s = math.sin(theta)
    t = 1.0 - c
    return np.array(
        [
            [c + ax * ax * t, ax * ay * t - az * s, ax * az * t + ay * s],
            [ay * ax * t + az * s, c + ay * ay * t, ay * az * t - ax * s],
            [az * ax * t - ay * s, az * ay * t + ax * s, c + az * az * t],
        ]
    )


def _exp_matrices(rs: np.ndarray) -> np.ndarray:
    # Vectorized Rodrigues formula: (n, 3) axis-angle vectors -> (n, 3, 3).
    # Zero rows fall out as exact identities (axis zeroed, cos 0 = 1).
    rs = np.asarray(rs, dtype=float)
    theta = np.linalg.norm(rs, axis=1)
    axis = np.zeros_like(rs)
    np.divide(rs, theta[:, None], out=axis, where=theta[:, None] > 0.0)
    ax, ay, az = axis[:, 0], axis[:, 1], axis[:, 2]
    c = np.cos(theta)
    s = np.sin(theta)
    t = 1.0 - c
    out = np.empty((rs.shape[0], 3, 3))
    out[:, 0, 0] = c + ax * ax * t
    out[:, 0, 1] = ax * ay * t - az * s
    out[:, 0, 2] = ax * az * t + ay * s
    out[:, 1, 0] = ay * ax * t + az * s
    out[:, 1, 1] = c + ay * ay * t
    out[:, 1, 2] = ay * az * t - ax * s
    out[:, 2, 0] = az * ax * t - ay * s
    out[:, 2, 1] = az * ay * t + ax * s
    out[:, 2, 2] = c + az * az * t
    return out


def _relative_angles(ma: np.ndarray, mb: np.ndarray) -> np.ndarray:
    # Batch angular distance: trace(b^T a) reduces to an elementwise product sum.
    c = (np.einsum("nij,nij->n", ma, mb) - 1.0) / 2.0
    return np.arccos(np.clip(c, -1.0, 1.0))


def exp_map(r: AxisAngle) -> RotationMatrix:
    """Rodrigues exponential: axis-angle vector to rotation matrix.

    The zero vector maps to the exact identity matrix (no rounding residue).
    """
    x, y, z = r.r
    return RotationMatrix(_rodrigues(x, y, z))


def angle_of(rot: RotationMatrix) -> Angle:
    """Rotation angle from the trace, arccos((trace - 1) / 2), clamped to [-1, 1]."""
    m = rot.m
    c = (float(m[0, 0] + m[1, 1] + m[2, 2]) - 1.0) / 2.0
    return Angle(math.acos(min(1.0, max(-1.0, c))))


def log_map(rot: RotationMatrix) -> AxisAngle:
    """Inverse of exp_map: rotation matrix to axis-angle vector in the pi-ball.

    The angle comes from the trace; the axis from the skew part, with a series
    fallback for tiny angles and a symmetric-part recovery near pi where the
    skew part degenerates. At angle pi exactly (axis sign unresolvable) the
    axis is canonicalized so its first nonzero component is positive.
    """
    theta = float(angle_of(rot))
    m = rot.m
    skew = np.array(
        [
            float(m[2, 1] - m[1, 2]),
            float(m[0, 2] - m[2, 0]),
            float(m[1, 0] - m[0, 1]),
        ]
    )
    if theta < _SMALL_ANGLE:
        # r = theta/(2 sin theta) * skew; series keeps the quotient finite at 0.
        factor = 0.5 + theta * theta / 12.0
        return AxisAngle(factor * skew)
    if theta < _NEAR_PI:
        # Scale the skew direction to the trace angle exactly, so the
        # returned norm equals angle_of to the last ulp.
        return AxisAngle((theta / float(np.linalg.norm(skew))) * skew)

    # Near pi: (R + R^T)/2 - cos(theta) I = (1 - cos(theta)) aa^T up to rounding.
    c = math.cos(theta)
    sym = (m + m.T) * 0.5 - c * _EYE
    j = int(np.argmax(np.diag(sym)))
    axis = np.asarray(sym[:, j], dtype=float).copy()
    axis /= float(np.linalg.norm(axis))
    if float(np.linalg.norm(skew)) > _SIGN_TOL:
        if float(axis @ skew) < 0.0:
            axis = -axis
    else:
        for comp in axis:
            if abs(comp) > _SIGN_TOL:
                if comp < 0.0:
                    axis = -axis
                break
    return AxisAngle(theta * axis)


def compose(a: RotationMatrix, b: RotationMatrix) -> RotationMatrix:
    """Rotation equivalent to applying a first, then b: the product b.m @ a.m."""
    return RotationMatrix(b.m @ a.m)


def inverse(rot: RotationMatrix) -> RotationMatrix:
    """Inverse rotation, the transpose."""
    return RotationMatrix(rot.m.T)


def angular_distance(a: RotationMatrix, b: RotationMatrix) -> Angle:
    """Angular metric: the rotation angle of b^-1 a.

    Computed as arccos((trace(b^T a) - 1) / 2) with the cosine clamped to
    [-1, 1]. Bi-invariant: unchanged by composing both arguments with a
    common rotation on either side.
    """
    # trace(b^T a) is the elementwise product sum; avoids forming the product.
    c = (float(np.einsum("ij,ij->", a.m, b.m)) - 1.0) / 2.0
    return Angle(math.acos(min(1.0, max(-1.0, c))))


def enclosed_angle(u, v) -> Angle:
    """Angle in [0, pi] between two unit 3-vectors; rejects non-unit inputs."""
    u = np.asarray(u, dtype=float).reshape(3)
    v = np.asarray(v, dtype=float).reshape(3)
    for name, w in (("first", u), ("second", v)):
        n = float(np.linalg.norm(w))
        if abs(n - 1.0) > UNIT_TOL:
            raise ValueError(f"{name} vector is not unit length (norm {n!r})")
    c = float(u @ v)
    return Angle(math.acos(min(1.0, max(-1.0, c))))


def _quaternions_to_matrices(q: np.ndarray) -> np.ndarray:
    # q: (n, 4) unit quaternions (w, x, y, z) -> (n, 3, 3). Internal only.
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    out = np.empty((q.shape[0], 3, 3))
    out[:, 0, 0] = 1.0 - 2.0 * (y * y + z * z)
    out[:, 0, 1] = 2.0 * (x * y - w * z)
    out[:, 0, 2] = 2.0 * (x * z + w * y)
    out[:, 1, 0] = 2.0 * (x * y + w * z)
    out[:, 1, 1] = 1.0 - 2.0 * (x * x + z * z)
    out[:, 1, 2] = 2.0 * (y * z - w * x)
    out[:, 2, 0] = 2.0 * (x * z - w * y)
    out[:, 2, 1] = 2.0 * (y * z + w * x)
    out[:, 2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return out


def _random_rotation_matrices(n: int, rng: np.random.Generator) -> np.ndarray:
    # Uniform over SO(3): normalized 4-d Gaussian is uniform on the 3-sphere.
    q = rng.standard_normal((n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    return _quaternions_to_matrices(q)


def random_rotation(rng: np.random.Generator) -> RotationMatrix:
    """Uniform random rotation (normalized Gaussian quaternion).

    Draws exactly four normal variates from rng, so sequences are
    reproducible from the generator state.
    """
    return RotationMatrix(_random_rotation_matrices(1, rng)[0])


def _random_unit_vectors(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v


def orthonormalize(m, *, max_iterations: int = 100, tol: float = 1e-15) -> RotationMatrix:
    """Project a nearly-orthonormal matrix back onto SO(3).

    Iterated averaging with the inverse transpose, M <- (M + M^-T)/2, which
    converges quadratically for matrices near the group. Raises ValueError if
    the input is singular, has negative determinant, or fails to converge
    within max_iterations.
    """
    m = np.array(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    det = float(np.linalg.det(m))
    if det <= 0.0:
        raise ValueError(f"matrix determinant {det!r} is not positive")
    for _ in range(max_iterations):
        try:
            inv_t = np.linalg.inv(m).T
        except np.linalg.LinAlgError:
            raise ValueError("matrix became singular during orthonormalization")
        nxt = (m + inv_t) * 0.5
        if np.abs(nxt - m).max() < tol:
            return RotationMatrix(nxt)
        m = nxt
    raise ValueError(f"orthonormalization did not converge in {max_iterations} iterations")


class RotationParseError(ValueError):
    """Raised for malformed rotation text; carries the 1-based line number."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


def parse_rotation_line(line: str, line_number=None):
    """Parse one text line into AxisAngle (3 fields) or RotationMatrix (9, row-major)."""
    fields = line.split()
    values = []
    for f in fields:
        try:
            values.append(float(f))
        except ValueError:
            raise RotationParseError(f"not a number: {f!r}", line_number) from None
    if len(values) == 3:
        try:
            return AxisAngle(values)
        except ValueError as e:
            raise RotationParseError(str(e), line_number) from None
    if len(values) == 9:
        try:
            return RotationMatrix(np.array(values).reshape(3, 3))
        except ValueError as e:
            raise RotationParseError(str(e), line_number) from None
    raise RotationParseError(f"expected 3 or 9 numbers, got {len(values)}", line_number)


def parse_rotations(text: str):
    """Parse a whole document: one rotation per line, '#' comments and blanks skipped.

    Errors name the offending 1-based line number.
    """
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        out.append(parse_rotation_line(line, line_number=i))
    return out


def format_rotation(rot) -> str:
    """Serialize to one text line with 17 significant digits per number."""
    if isinstance(rot, AxisAngle):
        values = rot.r
    elif isinstance(rot, RotationMatrix):
        values = rot.m.reshape(-1)
    else:
        raise TypeError(f"cannot serialize {type(rot).__name__}")
    return " ".join(f"{v:.17g}" for v in values)


def as_matrix(rot) -> RotationMatrix:
    """Coerce either representation to a RotationMatrix."""
    if isinstance(rot, RotationMatrix):
        return rot
    if isinstance(rot, AxisAngle):
        return exp_map(rot)
    raise TypeError(f"cannot interpret {type(rot).__name__} as a rotation")
