"""Random problem generators shared by the test modules."""

import numpy as np

from rankone.jordan import JordanSpec


def cgauss(rng, n):
    return (rng.normal(size=n) + 1j * rng.normal(size=n)) / np.sqrt(2)


def random_partition(rng, total, max_parts=3):
    parts = []
    while total > 0:
        k = int(rng.integers(1, total + 1))
        parts.append(k)
        total -= k
        if len(parts) == max_parts - 1 and total > 0:
            parts.append(total)
            break
    return sorted(parts, reverse=True)


def random_eigenvalues(rng, r, radius=2.0, sep=0.5):
    lams = []
    while len(lams) < r:
        z = complex(*rng.uniform(-radius, radius, size=2))
        if all(abs(z - w) >= sep for w in lams):
            lams.append(z)
    return lams


def random_spec(rng, n_max=10, l_range=None):
    """Random JordanSpec with n <= n_max, optionally with deg m in l_range."""
    while True:
        n = int(rng.integers(1, n_max + 1))
        r = int(rng.integers(1, min(n, 4) + 1))
        cuts = sorted(rng.choice(np.arange(1, n), size=r - 1, replace=False)) if r > 1 else []
        totals = np.diff([0, *cuts, n])
        lams = random_eigenvalues(rng, r)
        spec = JordanSpec.of([(lam, random_partition(rng, int(t))) for lam, t in zip(lams, totals)])
        if l_range is None or spec.l in l_range:
            return spec
