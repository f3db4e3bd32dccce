"""Independent reference implementations used only by the tests.

None of these share code with the library: the dilogarithm is integrated
numerically with mpmath, the Lobachevsky function with scipy, and edge
classes are found by union-find instead of walking around edges.
"""

import math

import mpmath
from scipy.integrate import quad

mpmath.mp.dps = 30


def log_branch(x, theta=math.pi):
    """Logarithm with imaginary part in ``(theta - 2 pi, theta]``."""
    x = mpmath.mpc(x)
    # compare against the exact value, float pi is slightly below it
    theta = mpmath.pi if theta == math.pi else mpmath.mpf(theta)
    arg = mpmath.arg(x)  # in (-pi, pi]
    while arg > theta:
        arg -= 2 * mpmath.pi
    while arg <= theta - 2 * mpmath.pi:
        arg += 2 * mpmath.pi
    return mpmath.log(abs(x)) + 1j * arg


def li2_quad(z, theta=math.pi):
    """``-int_0^z Log(1-t)/t dt`` along the straight segment, given branch.

    For the principal branch on the cut ``x > 1`` the value is taken as the
    limit from below, matching ``Im Li2(x) = -pi log x``.
    """
    z = mpmath.mpc(z)
    if theta == math.pi and z.imag == 0 and z.real > 1:
        z = mpmath.mpc(z.real, -mpmath.mpf(10) ** -25)

    def f(s):
        t = s * z
        return -log_branch(1 - t, theta) / s

    pts = [0, 1]
    if z.real > 1:
        pts = [0, 1 / z.real, 1]
    return complex(mpmath.quad(f, pts))


def li2_half():
    return math.pi ** 2 / 12 - math.log(2) ** 2 / 2


def rogers_quad(z, theta=math.pi):
    return li2_quad(z, theta) + 0.5 * complex(log_branch(z, theta)) * complex(log_branch(1 - mpmath.mpc(z), theta))


def lhat_branch(z, w0, w1, theta):
    """Extended dilogarithm evaluated with the logarithm branch ``theta``.

    ``p`` and ``q`` are recomputed relative to that branch from the stored
    log-parameters.
    """
    lz = complex(log_branch(z, theta))
    l1z = complex(log_branch(1 - mpmath.mpc(z), theta))
    p = (w0 - lz) / (math.pi * 1j)
    q = (w1 + l1z) / (math.pi * 1j)
    p, q = round(p.real), round(q.real)
    return rogers_quad(z, theta) + 0.5j * math.pi * (q * lz + p * l1z) - math.pi ** 2 / 6


def lobachevsky(theta):
    """``-int_0^theta log|2 sin t| dt``."""
    val, _ = quad(lambda t: -math.log(abs(2 * math.sin(t))), 0, theta, limit=200)
    return val


def figure_eight_volume():
    return 6 * lobachevsky(math.pi / 3)


def cross_ratio_mp(z0, z1, z2, z3):
    return (z0 - z3) * (z1 - z2) / ((z0 - z2) * (z1 - z3))


def edge_partition(gluings):
    """Edge classes as sorted lists of ``(tet, edge_index)`` by union-find."""
    edges = [(0, 1), (1, 2), (0, 2), (2, 3), (0, 3), (1, 3)]
    index = {}
    for i, (a, b) in enumerate(edges):
        index[(a, b)] = index[(b, a)] = i
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x

    for t, row in enumerate(gluings):
        for face, (u, perm) in enumerate(row):
            for a, b in edges:
                if face not in (a, b):
                    parent[find((t, index[(a, b)]))] = find((u, index[(perm[a], perm[b])]))
    classes = {}
    for t in range(len(gluings)):
        for e in range(6):
            classes.setdefault(find((t, e)), []).append((t, e))
    return sorted(sorted(v) for v in classes.values())


def corner_exponents(gluings, signs):
    """Edge equation exponents of ``(z, z', z'')`` from the union-find partition."""
    param = [0, 1, 2, 0, 1, 2]
    out = []
    for cls in edge_partition(gluings):
        exps = [[0, 0, 0] for _ in gluings]
        for t, e in cls:
            exps[t][param[e]] += signs[t]
        out.append(tuple(map(tuple, exps)))
    return sorted(out)
