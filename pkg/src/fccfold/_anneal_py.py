"""Pure-Python single-flip Metropolis sweeps (fallback for the compiled kernel)."""
import math

import numpy as np


def anneal(term_offsets, term_vars, coeffs, var_offsets, var_terms,
           state, order, uniforms, betas, trace=None, check=None):
    """Run Metropolis sweeps in place on ``state``.

    Returns ``(best_state, best_delta)`` where ``best_delta`` is the best
    energy reached relative to the initial state.  ``check``, if given, is
    called as ``check(state, cur)`` after every accepted move.
    """
    toff = term_offsets.tolist()
    tvars = term_vars.tolist()
    c = coeffs.tolist()
    voff = var_offsets.tolist()
    vterms = var_terms.tolist()
    st = state.tolist()
    n = len(st)
    zero_count = [
        sum(1 for p in range(toff[t], toff[t + 1]) if st[tvars[p]] == 0)
        for t in range(len(c))
    ]
    incident = [vterms[voff[v]:voff[v + 1]] for v in range(n)]
    exp = math.exp
    cur = best = 0.0
    best_state = list(st)
    order_l = order.tolist()
    unif_l = uniforms.tolist()
    for s, beta in enumerate(betas.tolist()):
        row_u = unif_l[s]
        for i, v in enumerate(order_l[s]):
            old = st[v]
            inc = incident[v]
            delta = 0.0
            if old == 0:
                for t in inc:
                    if zero_count[t] == 1:
                        delta += c[t]
            else:
                for t in inc:
                    if zero_count[t] == 0:
                        delta -= c[t]
            if delta <= 0.0 or row_u[i] < exp(-beta * delta):
                st[v] = 1 - old
                step = -1 if old == 0 else 1
                for t in inc:
                    zero_count[t] += step
                cur += delta
                if check is not None:
                    check(st, cur)
                if cur < best:
                    best = cur
                    best_state = list(st)
        if trace is not None:
            trace[s] = st
    state[:] = st
    return np.array(best_state, dtype=np.int8), best
