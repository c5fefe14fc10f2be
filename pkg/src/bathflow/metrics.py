"""Fidelity, purity, entropy and trace distance of dense states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

CLAMP_TOL = 1e-10


@dataclass(frozen=True)
class MetricsRecord:
    fidelity_sb: float
    fidelity_reduced: float
    purity: float
    entropy: float
    trace_distance: float


def _support(*mats: np.ndarray) -> np.ndarray:
    # a PSD matrix with a zero diagonal entry has the whole row and column zero
    mask = np.zeros(mats[0].shape[0], dtype=bool)
    for m in mats:
        mask |= np.diag(m) != 0
    return np.flatnonzero(mask)


def _restricted_eigvalsh(a: np.ndarray, support: np.ndarray) -> np.ndarray:
    if support.size == a.shape[0]:
        return scipy.linalg.eigvalsh(a)
    return scipy.linalg.eigvalsh(a[np.ix_(support, support)])


def fidelity_pure_mixed(psi: np.ndarray, rho: np.ndarray, convention: str = "squared") -> float:
    """Overlap of a pure state with ``rho``.

    ``"squared"`` returns ``<psi|rho|psi>`` (for ``rho = |phi><phi|`` this is
    ``|<psi|phi>|^2``); ``"root"`` returns its square root.
    """
    psi = np.asarray(psi)
    rho = np.asarray(rho)
    if rho.shape != (psi.size, psi.size):
        raise ValueError(f"state of length {psi.size} does not match matrix {rho.shape}")
    value = float(np.real(np.vdot(psi, rho @ psi)))
    value = min(max(value, 0.0), 1.0)
    if convention == "squared":
        return value
    if convention == "root":
        return math.sqrt(value)
    raise ValueError(f"unknown fidelity convention {convention!r}")


def state_fidelity(psi: np.ndarray, phi: np.ndarray, convention: str = "squared") -> float:
    value = min(abs(np.vdot(psi, phi)) ** 2, 1.0)
    return value if convention == "squared" else math.sqrt(value)


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.vdot(rho, rho)))


def entropy(rho: np.ndarray, base: float | str = 2) -> float:
    """Von Neumann entropy, in bits by default (``base="e"`` gives nats)."""
    log = {2: np.log2, "2": np.log2, "bits": np.log2, "e": np.log, "nats": np.log}.get(base)
    if log is None:
        raise ValueError(f"unsupported entropy base {base!r}")
    rho = np.asarray(rho)
    vals = _restricted_eigvalsh(rho, _support(rho))
    if vals.size and vals.min() < -CLAMP_TOL:
        raise ValueError(f"eigenvalue {vals.min():.3g} is too negative for a density matrix")
    vals = vals[vals > 0]
    return float(max(-np.sum(vals * log(vals)), 0.0))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValueError("shape mismatch")
    diff = rho - sigma
    vals = _restricted_eigvalsh(diff, _support(rho, sigma))
    return float(min(0.5 * np.sum(np.abs(vals)), 1.0))
