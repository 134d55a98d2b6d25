"""Exact symbolic variational calculus on finite-order jet bundles.

Modules:

- :mod:`varseq.jet_space` — multi-indices, jet coordinates, jet spaces
- :mod:`varseq.symexpr` — scalar layer: opaque atoms, total/partial
  derivatives, canonicalization, serialization
- :mod:`varseq.forms` — differential forms in the contact-adapted
  coframe, exterior/horizontal/vertical differentials, contractions
- :mod:`varseq.variational` — interior Euler operator, residual,
  Euler-Lagrange and Helmholtz morphisms, Cartan/Lepage forms, contact
  homotopy and Tonti Lagrangians, variational triviality
- :mod:`varseq.prolong` — prolonged vector fields, Lie derivatives,
  Noether currents, first-variation splitting, symmetry checks
- :mod:`varseq.probe` — randomized exact-rational identity probing
- :mod:`varseq.dsl`, :mod:`varseq.render`, :mod:`varseq.cli` — the
  ``.jv`` model format and the ``varseq`` command line front-end
"""

from .jet_space import JetCoordinate, JetSpace, MultiIndex
from .forms import Form

__version__ = "0.1.0"

__all__ = ["JetCoordinate", "JetSpace", "MultiIndex", "Form",
           "__version__"]
