"""Cross-checking the 4n x 4n pipeline against brute force.

At n <= 3 the full 4^n x 4^n Liouvillean fits in memory, so every
pipeline observable can be compared against exact dense linear algebra:
the steady state from the kernel, entropies from reduced density
matrices, and the complete even-sector decay spectrum against the
binary combinations -2 nu . beta of the rapidities.
"""

import numpy as np

from openquad import ChainParams, xy_lindblad_model, xy_redfield_model
from openquad import normal_modes, spectral_gap, structure_matrix
from openquad.validation import oracle_check_table

for maker, tag in ((xy_redfield_model, "redfield"), (xy_lindblad_model, "lindblad")):
    model = maker(ChainParams(3, 0.6, 0.4))
    print(f"{tag} model, n = 3:")
    for name, dev in oracle_check_table(model):
        print(f"  {name:20s} max deviation {dev:.2e}")
    print()

model = xy_redfield_model(ChainParams(2, 0.5, 0.9))
modes = normal_modes(structure_matrix(model))
print("rapidities of the n = 2 chain:")
for b in modes.rapidities:
    print(f"  {b.real:+.6f} {b.imag:+.6f}i")
print(f"gap = 2 min Re beta = {spectral_gap(modes):.6f}")
print("\nevery eigenvalue of the even-sector Liouvillean is -2 nu . beta")
print("for a binary selector nu; see tests/test_acceptance.py for the")
print("multiset comparison against the dense spectrum.")
