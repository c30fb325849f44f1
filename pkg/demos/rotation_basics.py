"""Tour of the rotation representations: matrices, axis-angle vectors, and
the maps between them.

Run as a script; every section prints what it computes. Seeded, so two runs
print the same numbers.
"""

import math

import numpy as np

import rotbound as rb

PI = math.pi


def main():
    rng = np.random.default_rng(7)

    print("== constructing rotations ==")
    quarter_x = rb.exp_map(rb.AxisAngle([PI / 2, 0.0, 0.0]))
    print("quarter turn about x:")
    print(np.array_str(quarter_x.m, precision=6, suppress_small=True))
    print(f"angle_of = {float(rb.angle_of(quarter_x)):.12f} (pi/2 = {PI / 2:.12f})")

    print()
    print("== exp/log round trip ==")
    r = rb.AxisAngle([0.4, -1.1, 0.3])
    back = rb.log_map(rb.exp_map(r))
    print(f"r      = {r.r}")
    print(f"back   = {back.r}")
    print(f"error  = {np.linalg.norm(back.r - r.r):.3e}")

    print()
    print("== composition applies left to right ==")
    a = rb.exp_map(rb.AxisAngle([PI / 2, 0.0, 0.0]))
    b = rb.exp_map(rb.AxisAngle([0.0, 0.0, PI / 2]))
    both = rb.compose(a, b)
    e1 = np.array([0.0, 1.0, 0.0])
    print(f"a then b moves +y to {both.m @ e1}")
    print(f"composed angle = {float(rb.angle_of(both)):.12f} (2pi/3 = {2 * PI / 3:.12f})")

    print()
    print("== the angular metric ==")
    r1 = rb.random_rotation(rng)
    r2 = rb.random_rotation(rng)
    g = rb.random_rotation(rng)
    d = float(rb.angular_distance(r1, r2))
    d_moved = float(rb.angular_distance(rb.compose(r1, g), rb.compose(r2, g)))
    print(f"d(r1, r2)          = {d:.12f}")
    print(f"d(g.r1, g.r2)      = {d_moved:.12f}  (bi-invariant)")
    print(f"d(r1, r1)          = {float(rb.angular_distance(r1, r1)):.1f}")

    print()
    print("== text format round trip ==")
    line = rb.format_rotation(rb.log_map(r1))
    print(f"serialized: {line}")
    parsed = rb.parse_rotation_line(line)
    print(f"re-read matches: {np.array_equal(rb.as_matrix(parsed).m, rb.exp_map(rb.log_map(r1)).m)}")

    print()
    print("== cleaning a drifted matrix ==")
    drifted = r1.m + rng.normal(scale=1e-6, size=(3, 3))
    repaired = rb.orthonormalize(drifted)
    print(f"drift from SO(3): {np.abs(drifted @ drifted.T - np.eye(3)).max():.2e}")
    print(f"after repair:     {np.abs(repaired.m @ repaired.m.T - np.eye(3)).max():.2e}")
    print(f"moved by          {float(rb.angular_distance(r1, repaired)):.2e} rad")


if __name__ == "__main__":
    main()
