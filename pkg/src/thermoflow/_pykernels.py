"""Pure numpy implementations of the hot kernels.

Signatures and results match the compiled ``_ckernels`` module exactly; the
test-suite runs both against each other.
"""
import math

import numpy as np


def curve_gap(xu, yu, xl, yl):
    """Largest amount by which the lower polyline exceeds the upper one.

    Both polylines are given by kink coordinates with increasing x on a
    common domain.  The difference of two piecewise-linear functions is
    piecewise linear with breakpoints in the union of the kink sets, so the
    maximum over that union is the maximum over the whole domain.

    Returns ``(gap, x)`` with ``x`` the first location attaining the maximum.
    """
    xs = np.concatenate((xu, xl))
    xs.sort(kind="stable")
    diff = np.interp(xs, xl, yl) - np.interp(xs, xu, yu)
    k = int(np.argmax(diff))
    return float(diff[k]), float(xs[k])


def flattest_sorted(p, w, mult, eps):
    """Flattest-state levels for beta-ordered classes.

    ``p`` and ``w`` are per-element probability and thermal weight of each
    class, ``mult`` the number of identical elements in the class.  Returns
    ``(new_p, M, N)`` where the first ``M`` classes were lowered to a common
    ratio and classes ``N..K`` (1-based) raised to a common ratio.  ``M`` or
    ``N`` is ``-1`` when no admissible index exists.
    """
    p = np.asarray(p, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    mult = np.asarray(mult, dtype=np.float64)
    k = p.shape[0]
    ratio = p / w
    mass = mult * p
    weight = mult * w
    head_mass = np.cumsum(mass)
    head_weight = np.cumsum(weight)
    tail_mass = np.cumsum(mass[::-1])[::-1]
    tail_weight = np.cumsum(weight[::-1])[::-1]

    f_vals = head_mass[:-1] - ratio[1:] * head_weight[:-1]
    g_vals = ratio[:-1] * tail_weight[1:] - tail_mass[1:]
    hits_f = np.nonzero(f_vals >= eps)[0]
    hits_g = np.nonzero(g_vals >= eps)[0]
    m = int(hits_f[0]) + 1 if hits_f.size else -1
    n = int(hits_g[-1]) + 2 if hits_g.size else -1

    out = p.copy()
    if m > 0:
        out[:m] = w[:m] * ((head_mass[m - 1] - eps) / head_weight[m - 1])
    if n > 0:
        out[n - 1:] = w[n - 1:] * ((tail_mass[n - 1] + eps) / tail_weight[n - 1])
    return out, m, n


def compositions(n, d):
    """All length-``d`` nonnegative integer vectors summing to ``n``.

    Rows come in reverse-lexicographic order, starting at ``(n, 0, ..., 0)``.
    """
    count = math.comb(n + d - 1, d - 1)
    out = np.zeros((count, d), dtype=np.int64)
    row = 0
    counts = [0] * d
    counts[0] = n
    while True:
        out[row] = counts
        row += 1
        # step to the next composition: move one unit right from the last
        # nonzero position before the tail
        j = d - 2
        while j >= 0 and counts[j] == 0:
            j -= 1
        if j < 0:
            break
        tail = counts[d - 1]
        counts[d - 1] = 0
        counts[j] -= 1
        counts[j + 1] = tail + 1
    return out
