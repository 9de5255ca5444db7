#!/usr/bin/env python3
"""Classify integer toral automorphisms.

Walks through the exact pipeline: characteristic polynomial,
factorization over Q, certified eigenvalue moduli, and the hypothesis
flags (hyperbolic / irreducible / weakly irreducible / no-three-moduli /
forbidden eigenvalue pairs), ending with the lattice-search cross-check
for weak irreducibility.
"""

import json

from toralab import spectral

cat = spectral.automorphism([[2, 1], [1, 1]])
other = spectral.automorphism([[3, 1], [2, 1]])

print("=== the cat map ===")
print("charpoly:", spectral.char_poly(cat))
print(json.dumps(spectral.classify(cat).as_dict(), indent=2))

print("\n=== diag(L, L): reducible but weakly irreducible ===")
m = spectral.block_diagonal(cat, cat)
flags = spectral.classify(m)
print("irreducible:", flags.irreducible,
      " weakly irreducible:", flags.weakly_irreducible)

print("\n=== [[L, I], [0, L]]: a Jordan block on the torus ===")
m2 = spectral.block_upper_identity(cat)
flags2 = spectral.classify(m2)
print("irreducible:", flags2.irreducible,
      " weakly irreducible:", flags2.weakly_irreducible,
      " diagonalizable:", flags2.diagonalizable)
sd = spectral.lyapunov_splitting(m2)
print("adapted-norm contraction on E^s:", round(sd.stable_norm.contraction, 4),
      "(strict, despite the Jordan block)")

print("\n=== diag(A, B): moduli sets differ, weak irreducibility fails ===")
m3 = spectral.block_diagonal(cat, other)
flags3 = spectral.classify(m3)
print("weakly irreducible (factor moduli test):", flags3.weakly_irreducible)
verdict, witness = spectral.weakly_irreducible_definitional(m3)
print("definitional lattice search agrees:", verdict,
      " witness integer vector:", witness)

print("\n=== a non-hyperbolic companion matrix (roots of unity) ===")
comp = spectral.automorphism(
    [[0, 0, 0, -1], [1, 0, 0, -1], [0, 1, 0, -1], [0, 0, 1, -1]])
print("hyperbolic:", spectral.classify(comp).hyperbolic,
      " cluster moduli:", spectral.classify(comp).cluster_moduli)
