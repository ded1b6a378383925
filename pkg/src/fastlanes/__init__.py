"""fastlanes: a deterministic, seeded simulator of planar first-passage
percolation environments built around planted fast "highways", with an exact
geodesic engine and an analysis suite.

Two environment families are provided:

* the *simple* model — an 8-neighbor lattice whose diagonal bonds are sped up
  along randomly planted diagonal highways; and
* the *full* model — a 4-neighbor lattice with zigzag (staircase) and
  horizontal/vertical highways, a three-stage thinning procedure that enforces
  geometric separation rules, and a compensated per-bond cost decomposition.

Everything is reproducible from a single master seed: the random environment is
realized through counter-based hashing of absolute lattice coordinates, so any
two query windows agree on their overlap.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
