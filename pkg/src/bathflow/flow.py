"""Poor man's scaling of Pauli-string coefficients in an Ohmic bath.

Each qubit couples through its Z operator to an Ohmic bath with spectral
density ``J_i(w) = 2 alpha_i w`` below the cutoff ``omega_c``. Lowering the
running cutoff from ``omega_c`` to ``omega0`` rescales every Pauli string by
``(omega0 / omega_c) ** c(s)``, where ``c(s)`` sums ``alpha_i`` over the
qubits on which the string carries X or Y.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .pauli import PauliOperator, PauliString, anticommuting_support, coefficient_norm

LOCALIZED_FLOOR = 1e-6
FIXED_POINT_TOL = 1e-8
DEFAULT_ETA = 10.0


class FullyLocalized(RuntimeError):
    """The stopping condition has no solution above the floor.

    Coefficients that anticommute with the bath shrink faster than the
    cutoff itself, so the flow can be continued all the way down.
    """

    def __init__(self, floor: float, message: str | None = None):
        super().__init__(message or f"no self-consistent cutoff above floor {floor:.6g}")
        self.floor = floor


@dataclass(frozen=True)
class BathSpec:
    omega_c: float
    alpha: tuple[float, ...]
    cross: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.omega_c > 0:
            raise ValueError("omega_c must be positive")
        alpha = tuple(float(a) for a in self.alpha)
        if not alpha:
            raise ValueError("alpha must list one coupling per qubit")
        if any(a < 0 or not math.isfinite(a) for a in alpha):
            raise ValueError("couplings must be finite and non-negative")
        object.__setattr__(self, "alpha", alpha)
        if self.cross is not None:
            cross = np.array(self.cross, dtype=float)
            n = len(alpha)
            if cross.shape != (n, n):
                raise ValueError(f"cross couplings must be {n}x{n}")
            if np.max(np.abs(cross - cross.T)) > 1e-12:
                raise ValueError("cross couplings must be symmetric")
            if np.max(np.abs(np.diag(cross) - alpha)) > 1e-12:
                raise ValueError("cross-coupling diagonal must equal alpha")
            if np.any(cross < 0):
                raise ValueError("cross couplings must be non-negative")
            bound = np.sqrt(np.outer(alpha, alpha))
            if np.any(cross > bound + 1e-12):
                warnings.warn(
                    "cross couplings exceed sqrt(alpha_i alpha_j); shared-bath terms "
                    "will dominate the flow",
                    stacklevel=2,
                )
            cross.setflags(write=False)
            object.__setattr__(self, "cross", cross)

    @classmethod
    def uniform(cls, n: int, alpha: float, omega_c: float) -> BathSpec:
        return cls(omega_c, (alpha,) * n)

    @property
    def n(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class FlowResult:
    omega0: float
    effective: PauliOperator
    trajectory: tuple[tuple[float, dict[PauliString, float]], ...]

    def omegas(self) -> np.ndarray:
        return np.array([w for w, _ in self.trajectory])

    def coefficient_path(self, s: PauliString | str) -> np.ndarray:
        if isinstance(s, str):
            s = PauliString.from_label(s)
        return np.array([snap.get(s, 0.0) for _, snap in self.trajectory])


def _check_lengths(op: PauliOperator, bath: BathSpec):
    if op.n != bath.n:
        raise ValueError(f"operator has {op.n} qubits but the bath describes {bath.n}")


def _check_omega0(omega0: float, bath: BathSpec):
    if not 0 < omega0 <= bath.omega_c:
        raise ValueError(f"omega0={omega0!r} must lie in (0, omega_c={bath.omega_c!r}]")


def bath_exponent(s: PauliString, bath: BathSpec) -> float:
    """Combined coupling ``c(s)``: sum of ``alpha_i`` where ``s`` has X or Y."""
    if s.n != bath.n:
        raise ValueError(f"string has {s.n} qubits but the bath describes {bath.n}")
    return float(sum(bath.alpha[i] for i in sorted(anticommuting_support(s))))


def _scale(op: PauliOperator, bath: BathSpec, omega0: float) -> PauliOperator:
    ratio = omega0 / bath.omega_c
    return PauliOperator(op.n, {s: c * ratio ** bath_exponent(s, bath) for s, c in op.items()})


def flow_closed_form(h: PauliOperator, bath: BathSpec, omega0: float) -> PauliOperator:
    """Effective Hamiltonian at cutoff ``omega0`` to leading order."""
    _check_lengths(h, bath)
    _check_omega0(omega0, bath)
    return _scale(h, bath, omega0)


def transform_observable(q: PauliOperator, bath: BathSpec, omega0: float) -> PauliOperator:
    """Measured operator seen through the eliminated modes.

    For separate baths this is the same rescaling as the Hamiltonian; the
    identity string is untouched so ``<1> = 1`` is preserved.
    """
    _check_lengths(q, bath)
    _check_omega0(omega0, bath)
    return _scale(q, bath, omega0)


def _rk4_factor(z: np.ndarray) -> np.ndarray:
    return 1.0 + z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)))


def flow_ode(h: PauliOperator, bath: BathSpec, omega0: float, steps: int = 1000) -> FlowResult:
    """Integrate ``dD/dw = c D / w`` from ``omega_c`` down to ``omega0``.

    The output grid is log-spaced with ``steps`` intervals. Within each
    interval the equation is integrated in ``t = ln w`` by classical RK4 with
    substeps of size ``|c dt| <= 1e-3``. The equation is linear and diagonal,
    so ``m`` RK4 substeps amount to multiplying by ``R(c dt)^m`` with the RK4
    stability polynomial ``R(z) = 1 + z + z^2/2 + z^3/6 + z^4/24``.
    """
    _check_lengths(h, bath)
    _check_omega0(omega0, bath)
    if steps < 1:
        raise ValueError("steps must be at least 1")
    strings = list(h.terms)
    coeffs = np.array([h.terms[s] for s in strings], dtype=float)
    rates = np.array([bath_exponent(s, bath) for s in strings], dtype=float)

    grid = np.geomspace(bath.omega_c, omega0, steps + 1)
    grid[0], grid[-1] = bath.omega_c, omega0
    trajectory = [(float(grid[0]), dict(zip(strings, coeffs.tolist())))]
    fastest = float(rates.max()) if rates.size else 0.0
    for w_hi, w_lo in zip(grid[:-1], grid[1:]):
        dt = math.log(w_lo) - math.log(w_hi)  # negative: flowing downward
        sub = max(1, math.ceil(fastest * abs(dt) / 1e-3))
        coeffs = coeffs * _rk4_factor(rates * (dt / sub)) ** sub
        trajectory.append((float(w_lo), dict(zip(strings, coeffs.tolist()))))

    effective = PauliOperator(h.n, dict(zip(strings, coeffs.tolist())))
    return FlowResult(float(omega0), effective, tuple(trajectory))


def _norm_profile(h: PauliOperator, bath: BathSpec):
    mags = np.array([abs(c) for c in h.terms.values()], dtype=float)
    exps = np.array([bath_exponent(s, bath) for s in h.terms], dtype=float)

    def norm_at(w):
        ratio = np.asarray(w, dtype=float)[..., None] / bath.omega_c
        return (mags * ratio**exps).sum(axis=-1)

    return norm_at


def stopping_frequency(
    h: PauliOperator,
    bath: BathSpec,
    eta: float = DEFAULT_ETA,
    *,
    floor: float = LOCALIZED_FLOOR,
    max_iter: int = 500,
) -> float:
    """Lowest cutoff at which the flowed Hamiltonian is still ``eta`` times smaller.

    Returns the largest fixed point of ``w = eta * ||H_eff(w)||`` below
    ``omega_c`` using the coefficient norm. The monotone iteration
    ``w <- eta ||H_eff(w)||`` started at ``omega_c`` converges to exactly
    that point; after ``max_iter`` steps (or on stalling) the remaining
    interval is bracketed on a fine log grid and polished with Brent's
    method. If ``eta ||H|| >= omega_c`` no scaling is possible and
    ``omega_c`` itself is returned.

    Raises FullyLocalized when no fixed point exists above ``floor * omega_c``.
    """
    _check_lengths(h, bath)
    if not eta > 1:
        raise ValueError("eta must exceed 1")
    if not len(h):
        raise ValueError("stopping frequency is undefined for the zero operator")
    wc = bath.omega_c
    w_floor = floor * wc
    norm_at = _norm_profile(h, bath)

    def residual(w):
        return eta * norm_at(w) - w

    if residual(wc) >= 0:
        return wc

    w = wc
    for _ in range(max_iter):
        w_next = float(eta * norm_at(w))
        if w_next < w_floor:
            raise FullyLocalized(w_floor)
        if w - w_next <= 1e-13 * wc:
            w = w_next
            break
        w = w_next

    # residual(w) <= 0 here and every fixed point lies at or below w
    if residual(w) >= -1e-13 * wc:
        return float(w)
    grid = np.geomspace(w, w_floor, 20001)
    res = residual(grid)
    hit = np.flatnonzero(res >= 0)
    if hit.size == 0:
        raise FullyLocalized(w_floor)
    k = int(hit[0])
    root = brentq(lambda x: float(residual(x)), grid[k], grid[k - 1], xtol=1e-14 * wc, rtol=4e-16)
    if abs(residual(root)) > FIXED_POINT_TOL * wc:
        raise FullyLocalized(w_floor, "fixed-point polish failed to converge")
    return float(root)


def shared_bath_zz(h: PauliOperator, bath: BathSpec, omega0: float) -> PauliOperator:
    """Z_i Z_j couplings induced by bath modes shared between qubits.

    Uses the cross spectral density ``J_ij(w) = 2 alpha_ij w`` and keeps only
    the dominant term: each pair ``i < j`` gains
    ``-integral_{omega0}^{omega_c} J_ij(w) / (4 w) dw = -alpha_ij (omega_c - omega0) / 2``.
    Returned as an additive correction to the flowed Hamiltonian.
    """
    _check_lengths(h, bath)
    _check_omega0(omega0, bath)
    if bath.cross is None:
        raise ValueError("bath has no cross couplings")
    n = bath.n
    terms = {}
    for i in range(n):
        for j in range(i + 1, n):
            a_ij = float(bath.cross[i, j])
            if a_ij > 0:
                label = ["I"] * n
                label[i] = label[j] = "Z"
                terms["".join(label)] = -a_ij * (bath.omega_c - omega0) / 2.0
    return PauliOperator(n, terms)


def flow_trajectories(
    exponents: Sequence[float],
    *,
    delta: float = 1.0,
    omega_c: float = 30.0,
    omega_min: float = 0.3,
    steps: int = 1000,
) -> dict[float, FlowResult]:
    """Single-string flows for a list of combined couplings ``c``.

    Each exponent is realized as a one-qubit X term with ``alpha = c``.
    """
    h = PauliOperator(1, {"X": delta})
    return {
        float(c): flow_ode(h, BathSpec(omega_c, (float(c),)), omega_min, steps)
        for c in exponents
    }
