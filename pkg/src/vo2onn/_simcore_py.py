"""Pure-Python network stepper (fallback backend).

Mirrors ``_simcore_cy`` operation for operation: the two backends consume
the same pre-generated noise array and precomputed branch constants, and
every floating-point expression is written with the same association, so
their outputs are bit-identical. Keep the loop bodies in sync with the
.pyx file when editing either.

State conventions: ``on[i]`` is 1 while switch i conducts, ``u_eff[i]``
is its current effective threshold (maintained incrementally as sources
switch), ``u_c[i]`` the capacitor voltage. One timestep = settle switch
states against this step's noise sample, optionally record switch
currents, then relax each capacitor toward its active-branch equilibrium.
"""
from __future__ import annotations


def run_network(
    u_c: list,
    on: list,
    u_eff: list,
    base_off: list,
    base_on: list,
    decay_off: float,
    decay_on: float,
    s: list,
    noise_flat: list,
    n_steps: int,
    n_osc: int,
    u_h: float,
    u_cf: float,
    r_off: float,
    r_on: float,
    currents=None,
):
    """Advance the network ``n_steps`` steps in place; return OFF->ON edge lists.

    ``noise_flat`` is the flattened (n_osc, n_steps) noise array: sample
    for oscillator i at step t sits at index i * n_steps + t.
    """
    edges = [[] for _ in range(n_osc)]
    record = currents is not None
    for t in range(n_steps):
        # Settle switch states at this noise sample. Voltages are frozen
        # during the settle, so releases (threshold-independent) happen
        # exactly once, first; the remaining turn-ons form a monotone
        # closure whose fixed point does not depend on sweep order.
        for i in range(n_osc):
            if on[i] and u_c[i] - noise_flat[i * n_steps + t] < u_h:
                on[i] = 0
                s_i = s[i]
                for k in range(n_osc):
                    u_eff[k] += s_i[k]
        for _sweep in range(n_osc + 2):
            changed = False
            for i in range(n_osc):
                if not on[i] and u_c[i] - noise_flat[i * n_steps + t] > u_eff[i]:
                    on[i] = 1
                    s_i = s[i]
                    for k in range(n_osc):
                        u_eff[k] -= s_i[k]
                    edges[i].append(t)
                    changed = True
            if not changed:
                break
        else:
            raise RuntimeError(
                "switch-state cascade failed to settle; a coupling sum has "
                "pushed an effective threshold below the holder voltage"
            )
        if record:
            for i in range(n_osc):
                u = u_c[i] - noise_flat[i * n_steps + t]
                if on[i]:
                    currents[t, i] = (u - u_cf) / r_on
                else:
                    currents[t, i] = u / r_off
        for i in range(n_osc):
            un = noise_flat[i * n_steps + t]
            if on[i]:
                tgt = base_on[i] + un
                u_c[i] = tgt + (u_c[i] - tgt) * decay_on
            else:
                tgt = base_off[i] + un
                u_c[i] = tgt + (u_c[i] - tgt) * decay_off
    return edges
