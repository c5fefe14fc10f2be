"""Bath-induced channels acting on qubit density matrices.

Eliminating bath modes down to ``omega0`` dephases qubit ``i`` with
probability ``1 - f_i``, ``f_i = (omega0 / omega_c) ** alpha_i``:

    rho -> (1 + f_i)/2 rho + (1 - f_i)/2 Z_i rho Z_i

Because ``Z_i`` is diagonal, ``Z_i rho Z_i`` only flips the sign of the
blocks of ``rho`` that are off-diagonal in qubit ``i``; the dense routines
therefore realize the operator sum by scaling those blocks in place, without
building Kraus matrices. ``pauli_scale_state`` is the equivalent statement in the
Pauli basis.
"""

from __future__ import annotations

import numpy as np

from .flow import BathSpec, _check_omega0, bath_exponent
from .pauli import PauliOperator, PauliString

STATE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
MAX_SHARED_EPS = 1e-2


def _num_qubits(rho: np.ndarray) -> int:
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if rho.ndim != 2 or rho.shape != (dim, dim) or dim != 1 << n or n < 1:
        raise ValueError(f"expected a 2^n x 2^n matrix, got shape {rho.shape}")
    return n


def validate_density_matrix(rho: np.ndarray, *, check_positive: bool = True) -> np.ndarray:
    """Check Hermiticity, unit trace and (optionally) positivity; return ``rho``."""
    rho = np.asarray(rho)
    _num_qubits(rho)
    if np.max(np.abs(rho - rho.conj().T)) > STATE_TOL:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > STATE_TOL:
        raise ValueError(f"density matrix trace {np.trace(rho).real:.15g} != 1")
    if check_positive and np.linalg.eigvalsh(rho).min() < -POSITIVITY_TOL:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def pure_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi)
    return np.outer(psi, psi.conj())


def z_signs(n: int, qubit: int) -> np.ndarray:
    """Diagonal of ``Z_qubit`` in the computational basis."""
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range for {n} qubits")
    idx = np.arange(1 << n)
    return 1.0 - 2.0 * ((idx >> (n - 1 - qubit)) & 1)


def _conjugate_z(rho: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    return left[:, None] * rho * right[None, :]


def _scale_coherences(out: np.ndarray, n: int, qubit: int, f: float) -> None:
    # (1+f)/2 rho + (1-f)/2 Z rho Z keeps blocks diagonal in the qubit and
    # multiplies the two off-diagonal blocks by f
    lo = 1 << (n - 1 - qubit)
    hi = 1 << qubit
    view = out.reshape(hi, 2, lo, hi, 2, lo)
    view[:, 0, :, :, 1, :] *= f
    view[:, 1, :, :, 0, :] *= f


def dephase_qubit(rho: np.ndarray, qubit: int, f: float) -> np.ndarray:
    """Dephase one qubit, keeping a fraction ``f`` of its coherences."""
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"dephasing factor {f!r} outside [0, 1]")
    rho = np.asarray(rho)
    n = _num_qubits(rho)
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range for {n} qubits")
    out = np.array(rho, dtype=np.result_type(rho.dtype, np.float64), copy=True)
    if f != 1.0:
        _scale_coherences(out, n, qubit, f)
    return out


def dephasing_factors(bath: BathSpec, omega0: float) -> tuple[float, ...]:
    _check_omega0(omega0, bath)
    ratio = omega0 / bath.omega_c
    return tuple(ratio**a for a in bath.alpha)


def dephase_all(rho: np.ndarray, bath: BathSpec, omega0: float) -> np.ndarray:
    """Simultaneous local dephasing of every qubit (the maps commute)."""
    rho = np.asarray(rho)
    n = _num_qubits(rho)
    if n != bath.n:
        raise ValueError(f"state has {n} qubits but the bath describes {bath.n}")
    out = np.array(rho, dtype=np.result_type(rho.dtype, np.float64), copy=True)
    for i, f in enumerate(dephasing_factors(bath, omega0)):
        if f != 1.0:
            _scale_coherences(out, n, i, f)
    return out


def pauli_scale_state(rho_p: PauliOperator, bath: BathSpec, omega0: float) -> PauliOperator:
    """Dephasing of a state given by its Pauli coefficients.

    ``rho_p`` holds ``rho = sum_s c_s P_s`` with ``c_I = 2^-n``. Each string
    scales exactly like the corresponding Hamiltonian term.
    """
    if rho_p.n != bath.n:
        raise ValueError(f"state has {rho_p.n} qubits but the bath describes {bath.n}")
    _check_omega0(omega0, bath)
    norm = rho_p[PauliString.identity(rho_p.n)]
    if abs(norm - 2.0 ** -rho_p.n) > STATE_TOL:
        raise ValueError(f"identity coefficient {norm!r} is not 2^-n; not a normalized state")
    ratio = omega0 / bath.omega_c
    return PauliOperator(rho_p.n, {s: c * ratio ** bath_exponent(s, bath) for s, c in rho_p.items()})


def ghz_offdiagonal_factor(n: int, alpha: float, ratio: float) -> float:
    """Suppression ``ratio ** (n alpha)`` of the GHZ coherence under uniform coupling."""
    if n < 1:
        raise ValueError("n must be positive")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if not 0 < ratio <= 1:
        raise ValueError("ratio must lie in (0, 1]")
    return ratio ** (n * alpha)


def shared_bath_state_step(
    rho: np.ndarray, i: int, j: int, eps: float, *, symmetric: bool = True
) -> np.ndarray:
    """Infinitesimal shell of a bath mode shared by qubits ``i`` and ``j``.

    One ordering gives the trace-preserving but nonlinear update

        rho -> (1 - eps Tr[rho Z_i Z_j]) rho + eps Z_i rho Z_j

    With ``symmetric=True`` (default) the ``(i, j)`` and ``(j, i)`` orderings
    are applied together, which keeps ``rho`` Hermitian.
    """
    if i == j:
        raise ValueError("shared-bath step needs two distinct qubits")
    if not 0.0 <= eps <= MAX_SHARED_EPS:
        raise ValueError(f"eps={eps!r} outside [0, {MAX_SHARED_EPS}]; the step is linearized")
    rho = np.asarray(rho)
    n = _num_qubits(rho)
    di, dj = z_signs(n, i), z_signs(n, j)
    zz = np.sum(np.diag(rho) * di * dj)  # Tr[rho Z_i Z_j]
    if symmetric:
        return (1.0 - 2.0 * eps * zz) * rho + eps * (_conjugate_z(rho, di, dj) + _conjugate_z(rho, dj, di))
    return (1.0 - eps * zz) * rho + eps * _conjugate_z(rho, di, dj)
