"""iwacalc: desk-scale exact computer algebra for Iwasawa-theoretic checks.

Subpackages cover p-adic and cyclotomic scalars (padic), truncated power
series over them and their localizations (series), finite l-group character
theory (lgroup), completed group algebras with determinant and trace maps
(algebra), logarithmic pseudomeasures and congruence checkers (logpseudo),
abelian p-adic L-functions over Q (lfunc), K1 Euler factors (euler) and a
command line front end (cli).
"""

from .context import PrecisionContext

__all__ = ["PrecisionContext"]
__version__ = "0.1.0"
