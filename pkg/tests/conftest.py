import mpmath as mp
import numpy as np
import pytest

import collbreak as cb


def quad_oracle(f, a, b, dps=30):
    """Independent quadrature reference, accurate for algebraic singularities at 0.

    Away from the origin this is plain tanh-sinh.  For integrals starting at
    zero the interval is split dyadically toward the endpoint and the
    geometric tail of the slice sums is accelerated from the measured slice
    ratio, which converges for any integrable power singularity.
    """
    with mp.workdps(dps):
        a = mp.mpf(a)
        b = mp.mpf(b)
        if a > 0:
            return float(mp.quad(f, [a, b]))
        tol = mp.mpf(10) ** (-(dps - 10))
        total = mp.mpf(0)
        hi = b
        inc_prev = None
        estimate = None
        for _ in range(200):
            lo = hi / 2
            inc = mp.quad(f, [lo, hi])
            total += inc
            if inc_prev is not None and inc_prev != 0:
                ratio = inc / inc_prev
                if 0 < ratio < 1:
                    candidate = total + inc * ratio / (1 - ratio)
                    if estimate is not None and abs(candidate - estimate) <= tol * abs(
                        candidate
                    ):
                        return float(candidate)
                    estimate = candidate
            inc_prev = inc
            hi = lo
        return float(estimate if estimate is not None else total)


@pytest.fixture(scope="session")
def small_problem():
    """Cheap exponential-data problem used by several unit tests."""
    grid = cb.build_grid(1e-3, 10.0, 48)
    kernel = cb.KernelSpec(0.6, 0.6)
    law = cb.DaughterLaw(-1.2, 0.5)
    workspace = cb.precompute(grid, kernel, law)
    state0 = cb.exponential_state(grid, 1.0, 1.0)
    return workspace, state0


@pytest.fixture(scope="session")
def small_run(small_problem):
    workspace, state0 = small_problem
    return cb.simulate(workspace, state0, np.linspace(0.0, 0.4, 9))
