"""Exact calculators for logarithmic charts, virtual points, and genus-zero operads.

The package is organized bottom-up:

- ``rational``: exact multivariate polynomial / rational-function arithmetic.
- ``intlinalg``: Smith normal form and integer lattice utilities.
- ``monoid``: affine monoids, group completion, saturation checks, homs.
- ``logmodel``: monomial log charts and virtual/ordinary monomial morphisms.
- ``tangential``: tangential basepoints as virtual points; enumeration; strata lifts.
- ``forms``: logarithmic differential forms, residues, regularized pullbacks.
- ``curves``: stable genus-zero curves, transport of basepoints, operadic gluing.
- ``trees``: planar rooted trees (the integral points of the curve operad).
- ``arnold``: the graded algebra of global log forms on configuration operads.
- ``braids``: braid words, the Artin action, parenthesized-braid morphisms.
- ``kn``: set-level polar decompositions of virtual points.
- ``cli``: command-line front end.
"""

__version__ = "0.1.0"
