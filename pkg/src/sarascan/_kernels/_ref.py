"""Pure-Python (NumPy) reference implementations of the hot kernels.

Used whenever the compiled extension is unavailable, and kept as the
behavioural reference the extension is tested against.
"""

from collections import deque

import numpy as np


def equal_weight_profile(y, h):
    """Mean over (x-h, x] minus mean over (x, x+h], for x = h .. n-h.

    Evaluated through the running one-step update; ``np.cumsum`` accumulates
    sequentially, so this is the same left-to-right recursion the compiled
    kernel performs.
    """
    n = y.shape[0]
    steps = np.empty(n - 2 * h + 1)
    steps[0] = (y[:h].sum() - y[h:2 * h].sum()) / h
    if steps.shape[0] > 1:
        steps[1:] = (2.0 * y[h:n - h] - y[:n - 2 * h] - y[2 * h:]) / h
    return np.cumsum(steps)


def local_max_keep(absd, h):
    """Offsets whose value dominates the open window of radius h-1 around them.

    Ties inside a window go to the leftmost position, so survivors end up at
    least h apart.  Implemented as a monotonic-deque sweep: the deque front is
    always the earliest offset attaining the window maximum.
    """
    m = absd.shape[0]
    r = h - 1
    dq = deque()
    keep = []
    for q in range(m + r):
        if q < m:
            v = absd[q]
            while dq and absd[dq[-1]] < v:
                dq.pop()
            dq.append(q)
        d = q - r
        if d < 0:
            continue
        lo = d - r
        while dq[0] < lo:
            dq.popleft()
        if dq[0] == d:
            keep.append(d)
    return np.asarray(keep, dtype=np.intp)
