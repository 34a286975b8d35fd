"""Independent reference computations used as test oracles."""

import math

import numpy as np


def adaptive_simpson(f, a, b, tol=1e-13, max_depth=50):
    """Classic recursive adaptive Simpson with Richardson correction."""

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return (recurse(a, m, fa, flm, fm, left, tol / 2, depth - 1)
                + recurse(m, b, fm, frm, fb, right, tol / 2, depth - 1))

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth)


def cell_mean(f, tol=1e-13):
    """(1/2pi) int_0^{2pi} f, split in quarters to keep the recursion shallow."""
    edges = np.linspace(0.0, 2 * math.pi, 5)
    return sum(adaptive_simpson(f, a, b, tol / 4) for a, b in zip(edges[:-1], edges[1:])) / (2 * math.pi)


# Strang-Fix 7-point, degree-5 rule on the reference triangle (barycentric coords, weights sum to 1)
_a1, _b1 = 0.059715871789770, 0.470142064105115
_a2, _b2 = 0.797426985353087, 0.101286507323456
TRI7_BARY = np.array([
    [1 / 3, 1 / 3, 1 / 3],
    [_a1, _b1, _b1], [_b1, _a1, _b1], [_b1, _b1, _a1],
    [_a2, _b2, _b2], [_b2, _a2, _b2], [_b2, _b2, _a2],
])
TRI7_W = np.array([0.225] + [0.132394152788506] * 3 + [0.125939180544827] * 3)


def tri7_l2(nodes, triangles, q1, q2):
    """||Q||_{L2} of a P1 field via 7-point quadrature on every triangle."""
    p = nodes[triangles]
    det = ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
           - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1]))
    area = 0.5 * det
    total = 0.0
    for q in (q1, q2):
        vals = TRI7_BARY @ q[triangles].T  # (7, T)
        total += float(np.sum(area * (TRI7_W @ vals**2)))
    return math.sqrt(2.0 * total)


def shoelace(poly):
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
