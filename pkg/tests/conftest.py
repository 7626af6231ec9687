import numpy as np
import pytest

from sketchlift import GmmSpec, generate_gmm, separation_from_lambda, threshold_full
from sketchlift.theory import ThresholdInputs


def make_gmm(sizes, p, *, ratio=None, lambda_star=None, delta2=None,
             sigma=1.0, seed=0, layout="simplex"):
    """Mixture draw with pinned separation: ``delta2`` is the absolute
    squared center distance, ``ratio`` scales the full-data threshold,
    ``lambda_star`` squares into that threshold."""
    if delta2 is None:
        inputs = ThresholdInputs(sizes=tuple(sizes), p=p, sigma=sigma)
        if lambda_star is not None:
            delta2 = separation_from_lambda(lambda_star, inputs)
        elif ratio is not None:
            delta2 = ratio * threshold_full(inputs)
        else:
            raise ValueError("need ratio, lambda_star, or delta2")
    spec = GmmSpec(sizes=tuple(sizes), p=p, sigma=sigma, delta=float(np.sqrt(delta2)),
                   layout=layout, seed=seed)
    return generate_gmm(spec)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
