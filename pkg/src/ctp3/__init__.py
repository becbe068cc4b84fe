"""Cassels-Tate pairing on 3-isogeny Selmer groups of elliptic curves over Q.

The pipeline: solve cubic norm equations by a Legendre-type descent on
binary cubic forms, lift Selmer elements to cocycles in an explicit
degree-6 tower Q(zeta3, cbrt(n)), evaluate Hilbert norm residue symbols
p-adically, and assemble the global pairing matrix with its rank report.
"""

__version__ = "0.1.0"
