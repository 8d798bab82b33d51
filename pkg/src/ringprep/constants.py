"""Physical constants and fixed operators. All frequencies are angular (rad/s)."""

import numpy as np

TWO_PI = 2.0 * np.pi

# Electron and 13C gyromagnetic ratios (rad/s/T) and NV zero-field splitting.
GAMMA_E = TWO_PI * 28.02495164e9
GAMMA_C13 = TWO_PI * 10.7084e6
D_ZFS = TWO_PI * 2.87e9

# mu0/(4 pi) * gamma_e * gamma_c * hbar in rad/s * nm^3: point-dipole
# electron-nuclear coupling scale.
_MU0_4PI = 1e-7
_HBAR = 1.054571817e-34
HYPERFINE_SCALE_NM3 = _MU0_4PI * GAMMA_E * GAMMA_C13 * _HBAR * 1e27

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

# Spin-1 operators in the basis (|+1>, |0>, |-1>); the qubit is encoded as
# |0_L> = |m_s=+1>, |1_L> = |m_s=0>.
S1_X = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / np.sqrt(2)
S1_Y = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / np.sqrt(2)
S1_Z = np.diag([1.0, 0.0, -1.0]).astype(complex)
