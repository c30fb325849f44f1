import math

import numpy as np

import rotbound as rb
from rotbound.rotations import _exp_matrices, _random_unit_vectors


def averaging_instance(seed, noise=0.1, m=10):
    """Clustered rotation-averaging instance: truth plus bounded perturbations.

    Returns (list of RotationMatrix, truth RotationMatrix).
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    truth = rb.random_rotation(rng)
    axes = _random_unit_vectors(m, rng)
    angles = rng.uniform(0.0, noise, m)
    perturbs = _exp_matrices(axes * angles[:, None])
    rotations = [rb.RotationMatrix(truth.m @ p) for p in perturbs]
    return rotations, truth


def ball_grid_minimum(rotations, step=0.02):
    """Brute-force oracle: scan the whole pi-ball on a uniform grid.

    Independent of the solver: relative angles come from the analytic trace
    identity trace(R_i^T R(r)) = c*tr(R_i) + (1-c)*a^T S_i a + s*a.w_i
    rather than from materialized matrices. Returns (best, lower) dicts over
    all three aggregators, where `lower` degrades each residual by the grid
    half-diagonal sqrt(3)*step/2 (clamped at zero), making it a certified
    lower bound on the global minimum at this resolution.
    """
    mats = np.stack([r.m for r in rotations])
    m = mats.shape[0]
    tr = np.trace(mats, axis1=1, axis2=2)
    sym = (mats + mats.transpose(0, 2, 1)) / 2.0
    sym_flat = sym.transpose(1, 0, 2).reshape(3, 3 * m)
    wvec = np.stack(
        [
            mats[:, 2, 1] - mats[:, 1, 2],
            mats[:, 0, 2] - mats[:, 2, 0],
            mats[:, 1, 0] - mats[:, 0, 1],
        ],
        axis=1,
    )
    xs = np.arange(-math.pi, math.pi + step / 2.0, step)
    delta = math.sqrt(3.0) * step / 2.0
    best = {"linf": math.inf, "l1": math.inf, "l2sq": math.inf}
    lower = {"linf": math.inf, "l1": math.inf, "l2sq": math.inf}
    aggs = (
        ("linf", lambda a: a.max(axis=1)),
        ("l1", lambda a: a.sum(axis=1)),
        ("l2sq", lambda a: (a * a).sum(axis=1)),
    )
    yz = np.stack(np.meshgrid(xs, xs, indexing="ij"), axis=-1).reshape(-1, 2)
    for i0 in range(0, len(xs), 4):
        xblock = xs[i0 : i0 + 4]
        pts = np.concatenate(
            [np.repeat(xblock, yz.shape[0])[:, None], np.tile(yz, (len(xblock), 1))],
            axis=1,
        )
        norms = np.linalg.norm(pts, axis=1)
        mask = norms <= math.pi
        if not mask.any():
            continue
        pts = pts[mask]
        norms = norms[mask]
        ax = np.zeros_like(pts)
        np.divide(pts, norms[:, None], out=ax, where=norms[:, None] > 0)
        c = np.cos(norms)
        s = np.sin(norms)
        qf = np.einsum("kmi,ki->km", (ax @ sym_flat).reshape(-1, m, 3), ax)
        traces = c[:, None] * tr[None, :] + (1.0 - c[:, None]) * qf + s[:, None] * (ax @ wvec.T)
        th = np.arccos(np.clip((traces - 1.0) / 2.0, -1.0, 1.0))
        thl = np.maximum(0.0, th - delta)
        for name, agg in aggs:
            best[name] = min(best[name], float(agg(th).min()))
            lower[name] = min(lower[name], float(agg(thl).min()))
    return best, lower
