import json
import sys
from pathlib import Path

import numpy as np
import pytest

from ncmart.algebra import Filtration, TracialAlgebra, dyadic_averaging
from ncmart.verify import Instance, InstanceSpec

TESTS = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS))
GOLDEN = TESTS / "golden" / "derived.json"


def cplx(a):
    a = np.asarray(a, dtype=float)
    return a[..., 0] + 1j * a[..., 1]


def dyadic_instance(weights, x, levels, seed=0):
    """Commutative instance on ``len(weights)`` atoms with terminal ``diag(x)``."""
    w = np.asarray(weights, dtype=float)
    algebra = TracialAlgebra(tuple((1, float(v)) for v in w))
    filt = dyadic_averaging(algebra, levels)
    spec = InstanceSpec(dim=len(w), levels=levels, mode="dyadic", weighted=True, seed=seed)
    return Instance(spec, filt, np.diag(np.asarray(x)))


def pinching_instance(x, partitions, seed=0):
    n = x.shape[0]
    algebra = TracialAlgebra(((n, 1.0),))
    filt = Filtration(algebra, "pinching", partitions=partitions)
    spec = InstanceSpec(dim=n, levels=len(partitions), filtration="random", seed=seed)
    return Instance(spec, filt, x)


@pytest.fixture(scope="session")
def golden():
    with open(GOLDEN, encoding="utf-8") as fh:
        doc = json.load(fh)
    out = {}
    for e in doc["entries"]:
        out.setdefault(e["name"], []).append(e)
    return out
