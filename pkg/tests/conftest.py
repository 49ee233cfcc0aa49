import numpy as np
import pytest

import sarascan as ss


@pytest.fixture(scope="session")
def benchmark_study():
    """One shared 1000-replicate run of the six-change-point benchmark.

    Used by the model-size and detection acceptance checks so the expensive
    Monte-Carlo loop runs once.
    """
    detectors = {
        "sara15": ss.sara_detector(15, criterion="mbic"),
        "msara": ss.msara_detector((9, 15, 21), threshold_constant=2.0, criterion="mbic"),
    }
    return ss.model_size_study(detectors, sigma=0.2, trend="none", reps=1000, seed=3)


def rss_direct(y, changepoints):
    """Residual sum of squares around per-segment means, straight from the definition."""
    y = np.asarray(y, dtype=float)
    edges = [0, *changepoints, len(y)]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        seg = y[lo:hi]
        total += float(((seg - seg.mean()) ** 2).sum())
    return total
