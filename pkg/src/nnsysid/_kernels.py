"""Compiled inner loops for free-run simulation and Jacobian propagation.

Both recursions are sequential in time (each step consumes previous outputs),
so they cannot be batched; jitting keeps the per-step cost comparable to the
fully vectorized series-parallel path. Pure-numpy reference versions live in
``dynmodel`` and the test suite checks the two agree.
"""

import numpy as np
from numba import njit, types
from numba.typed import List

_MAT = types.float64[:, ::1]
_VEC = types.float64[::1]


def weight_lists(net):
    """Split a net into the layer-1 feedback block plus typed lists for the
    remaining layers, as consumed by :func:`rollout`."""
    ws = List.empty_list(_MAT)
    gs = List.empty_list(_VEC)
    for w, b in zip(net.weights[1:], net.biases[1:]):
        ws.append(np.ascontiguousarray(w))
        gs.append(np.ascontiguousarray(b))
    acts = np.array(
        [1 if s.activation == "tanh" else 0 for s in net.structure.layers],
        dtype=np.int64,
    )
    return ws, gs, acts


@njit(cache=True)
def rollout(ys, pre1, w1y, ws_rest, gs_rest, acts, ny, k0):
    """Free-run recursion. ``ys`` rows below ``k0`` hold the startup window;
    ``pre1[k - k0]`` is the input-block contribution plus bias of layer 1."""
    n, n_y = ys.shape
    nlag = ny * n_y
    h1 = w1y.shape[0]
    xlag = np.empty(nlag)
    for k in range(k0, n):
        for i in range(ny):
            for c in range(n_y):
                xlag[i * n_y + c] = ys[k - 1 - i, c]
        a = np.empty(h1)
        for r in range(h1):
            s = pre1[k - k0, r]
            for c in range(nlag):
                s += w1y[r, c] * xlag[c]
            a[r] = np.tanh(s) if acts[0] == 1 else s
        for l in range(len(ws_rest)):
            w = ws_rest[l]
            g = gs_rest[l]
            b = np.empty(w.shape[0])
            for r in range(w.shape[0]):
                s = g[r]
                for c in range(w.shape[1]):
                    s += w[r, c] * a[c]
                b[r] = np.tanh(s) if acts[l + 1] == 1 else s
            a = b
        for c in range(n_y):
            ys[k, c] = a[c]
    return ys


@njit(cache=True)
def propagate_jacobian(gmat, amat, ny, k0):
    """In-place sensitivity recursion.

    ``gmat[k]`` enters holding the direct derivative term of step ``k`` (zero
    rows for the startup window) and leaves holding the total derivative;
    ``amat[k][:, (i-1)*n_y : i*n_y]`` is the derivative of the step map with
    respect to the i-th output lag.
    """
    n, n_y, m = gmat.shape
    for k in range(k0, n):
        for i in range(1, ny + 1):
            if k - i < 0:
                continue
            for r in range(n_y):
                for c in range(m):
                    s = 0.0
                    for q in range(n_y):
                        s += amat[k, r, (i - 1) * n_y + q] * gmat[k - i, q, c]
                    gmat[k, r, c] += s
    return gmat
