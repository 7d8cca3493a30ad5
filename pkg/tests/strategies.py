"""Hypothesis strategies shared by the property tests."""

from hypothesis import strategies as st

from bestk_bandit.core import Instance

# Means on this grid keep every gap a multiple of 1/GRID, so levels stay small
# and all float arithmetic on gaps is exact.
GRID = 1024


@st.composite
def dyadic_instances(draw, min_arms: int = 2, max_arms: int = 12):
    """Instances with k < n, grid means in [0, 1/2] and no boundary tie."""
    n = draw(st.integers(min_value=min_arms, max_value=max_arms))
    ticks = draw(st.lists(st.integers(min_value=0, max_value=GRID // 2), min_size=n, max_size=n))
    ordered = sorted(ticks, reverse=True)
    boundaries = [k for k in range(1, n) if ordered[k - 1] > ordered[k]]
    if not boundaries:
        ticks[0] = ticks[0] + 1 if ticks[0] < GRID // 2 else ticks[0] - 1
        ordered = sorted(ticks, reverse=True)
        boundaries = [k for k in range(1, n) if ordered[k - 1] > ordered[k]]
    k = draw(st.sampled_from(boundaries))
    return Instance.build([t / GRID for t in ticks], k=k)
