# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled network stepper (hot loop).

Keep the loop body in sync with ``_simcore_py.run_network``: same
operations, same association, on the same precomputed constants, so the
two backends produce bit-identical trajectories (the extension is built
with -ffp-contract=off for this reason).
"""


def run_network(
    double[::1] u_c,
    unsigned char[::1] on,
    double[::1] u_eff,
    const double[::1] base_off,
    const double[::1] base_on,
    double decay_off,
    double decay_on,
    const double[:, ::1] s,
    const double[:, ::1] noise,
    double u_h,
    double u_cf,
    double r_off,
    double r_on,
    double[:, ::1] currents=None,
):
    """Advance the network over every noise column in place; return edge lists.

    ``noise`` has shape (n_osc, n_steps): one row per oscillator substream.
    """
    cdef Py_ssize_t n_osc = noise.shape[0]
    cdef Py_ssize_t n_steps = noise.shape[1]
    cdef Py_ssize_t t, i, k, sweep
    cdef bint changed, settled, record = currents is not None
    cdef double u, un, tgt
    edges = [[] for _ in range(n_osc)]
    cdef list edge_i

    for t in range(n_steps):
        # releases first (threshold-independent), then the monotone
        # turn-on closure; mirrors _simcore_py exactly
        for i in range(n_osc):
            if on[i] and u_c[i] - noise[i, t] < u_h:
                on[i] = 0
                for k in range(n_osc):
                    u_eff[k] += s[i, k]
        settled = False
        for sweep in range(n_osc + 2):
            changed = False
            for i in range(n_osc):
                if not on[i] and u_c[i] - noise[i, t] > u_eff[i]:
                    on[i] = 1
                    for k in range(n_osc):
                        u_eff[k] -= s[i, k]
                    edge_i = <list> edges[i]
                    edge_i.append(t)
                    changed = True
            if not changed:
                settled = True
                break
        if not settled:
            raise RuntimeError(
                "switch-state cascade failed to settle; a coupling sum has "
                "pushed an effective threshold below the holder voltage"
            )
        if record:
            for i in range(n_osc):
                u = u_c[i] - noise[i, t]
                if on[i]:
                    currents[t, i] = (u - u_cf) / r_on
                else:
                    currents[t, i] = u / r_off
        for i in range(n_osc):
            un = noise[i, t]
            if on[i]:
                tgt = base_on[i] + un
                u_c[i] = tgt + (u_c[i] - tgt) * decay_on
            else:
                tgt = base_off[i] + un
                u_c[i] = tgt + (u_c[i] - tgt) * decay_off
    return edges
