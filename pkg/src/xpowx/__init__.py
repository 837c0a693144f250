"""Number-theoretic toolkit around the self-power map x -> x^x mod p.

Subpackages cover: exact modular arithmetic (:mod:`xpowx.modmath`), the
self-power map and its fixed-point statistics (:mod:`xpowx.psimap`),
multiplicative independence of integer tuples (:mod:`xpowx.multind`),
exponent-restricted subsets of [2, q-1] (:mod:`xpowx.nset`), sparse
linear forms over F_q and avoidance densities (:mod:`xpowx.linforms`),
and the binomial fixed-point model with Q-Q diagnostics
(:mod:`xpowx.fhstats`).
"""

__version__ = "0.1.0"
