import pytest

from sinrsched.metricspace import FadingParams, MetricSpec
from sinrsched.sinrcore import Instance, Link


def make_instance(pairs, *, alpha=2.5, beta=1.0, dim=None, C=1.0, mode="uni", noise=0.0,
                  weights=None, precision="float"):
    """Build an instance from ``[(sender, receiver), ...]``; ids follow list order."""
    pairs = [(tuple(s), tuple(r)) for s, r in pairs]
    dim = dim or (len(pairs[0][0]) if pairs else 2)
    weights = weights or [1.0] * len(pairs)
    links = [Link(i, s, r, float(w)) for i, ((s, r), w) in enumerate(zip(pairs, weights))]
    return Instance(FadingParams(alpha, MetricSpec(dim, C)), beta, links, noise, mode, precision)


@pytest.fixture
def line():
    """Factory for collinear instances given as ``[(s, r), ...]`` scalars."""
    def build(pairs, **kw):
        kw.setdefault("alpha", 2.0)
        kw.setdefault("dim", 1)
        return make_instance([((s,), (r,)) for s, r in pairs], **kw)

    return build
