"""Hypothesis strategies shared by the test modules."""

import numpy as np
from hypothesis import strategies as st

from rugosity.profile import PeriodicProfile

coeff = st.floats(-0.5, 0.5, allow_nan=False, allow_infinity=False)


@st.composite
def profiles(draw, max_modes=4, nonnegative=True):
    k = draw(st.integers(0, max_modes))
    a = tuple(draw(st.lists(coeff, min_size=k, max_size=k)))
    b = tuple(draw(st.lists(coeff, min_size=k, max_size=k)))
    base = PeriodicProfile(0.0, a, b)
    a0 = draw(st.floats(0.0, 0.5))
    if nonnegative:
        t = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        a0 += max(0.0, -float(np.min(base(t)))) + 1e-3
    return PeriodicProfile(a0, a, b)
