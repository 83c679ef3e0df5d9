"""Build the Dirac-representation gamma matrices and check their algebra.

The sign of the anticommutator is read off the matrices themselves, then the
spin tensor is compared with the familiar alpha and Sigma matrices.
"""

import numpy as np

from dipolephase import anticommutator, build_gamma_basis, clifford_sign, maxabs, sigma_tensor

basis = build_gamma_basis()
eta = np.diag(basis.metric)
s = clifford_sign(basis)
print(f"metric diag: {list(basis.metric)}")
print(f"derived sign s in {{g^mu, g^nu}} = 2 s eta^(mu nu) I: {s:+d}")

worst = max(
    maxabs(anticommutator(basis.gamma[m], basis.gamma[n]) - 2 * s * eta[m, n] * np.eye(4))
    for m in range(4)
    for n in range(4)
)
print(f"worst of the 16 anticommutator residuals: {worst:.1e}")

print(f"|Sigma^01 - i alpha^1| = {maxabs(sigma_tensor(basis, 0, 1) - 1j * basis.alpha1):.1e}")
print(f"|Sigma^12 - Sigma^3|   = {maxabs(sigma_tensor(basis, 1, 2) - basis.sigma3):.1e}")

# beta alpha^i is anti-Hermitian; this matters for the induced potential later
ba = basis.beta @ basis.alpha2
print(f"beta alpha^2 + (beta alpha^2)^dagger = {maxabs(ba + ba.conj().T):.1e}")
