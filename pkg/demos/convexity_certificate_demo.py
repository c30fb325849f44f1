"""Why the distance bound holds: arccos-squared is convex on [0, 1].

The bound reduces, through the half-angle change of variables, to comparing
a chord of arccos-squared against the function. This script evaluates the
second derivative, cross-checks it against finite differences, and grids
the chord inequality exhaustively.
"""

import numpy as np

import rotbound as rb


def main():
    print("== second derivative of arccos^2 ==")
    print(f"value at 0      : {rb.arccos_sq_second_derivative(0.0)}")
    for x in (0.25, 0.5, 0.75, 0.99):
        print(f"value at {x:<4}   : {rb.arccos_sq_second_derivative(x):.9f}")
    print("the one-sided limit at 1 is 2/3; positive everywhere on [0, 1)")

    print()
    print("== finite-difference cross-check ==")
    rep = rb.second_derivative_check()
    print(f"max |formula - central difference| on [0, 0.99] : {rep.max_fd_deviation:.3e}")
    print(f"min formula value on [0, 1 - 1e-6]              : {rep.min_value:.9f}")
    print(f"passed: {rep.passed}")

    print()
    print("== chord inequality on a grid ==")
    for grid in (11, 41, 101):
        cert = rb.convexity_certificate(grid)
        x, y, d = cert.worst
        print(
            f"{grid:>4}^3 grid: max violation {cert.max_violation: .3e} "
            f"at (x={x:.2f}, y={y:.2f}, d={d:.2f})  passed={cert.passed}"
        )

    print()
    print("== what a violation would look like ==")
    # Chord minus function for a concave function (sqrt) fails immediately;
    # the same probe applied to arccos^2 stays nonpositive.
    xs = np.linspace(0.0, 1.0, 5)
    chord_mid = 0.5 * np.sqrt(xs[0]) + 0.5 * np.sqrt(xs[4])
    print(f"sqrt chord test at midpoint: {np.sqrt(0.5 * (xs[0] + xs[4])) - chord_mid:+.3f} (concave)")
    chord_mid = 0.5 * rb.arccos_sq(xs[0]) + 0.5 * rb.arccos_sq(xs[4])
    print(f"arccos^2 chord test        : {rb.arccos_sq(0.5 * (xs[0] + xs[4])) - chord_mid:+.3f} (convex)")


if __name__ == "__main__":
    main()
