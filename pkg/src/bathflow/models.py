"""Benchmark Hamiltonians and reference states."""

from __future__ import annotations

import random
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .pauli import PauliOperator

DEFAULT_SEED = 1
VARIANT_SEED = 2


@dataclass(frozen=True)
class AFMInstance:
    """Coupling graph of the antiferromagnetic annealing Hamiltonian at schedule point ``s``."""

    n: int
    edges: tuple[tuple[int, int], ...]
    s: float = 0.8

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"annealing parameter s={self.s!r} outside [0, 1]")
        norm = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop on qubit {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge {i}-{j} outside {self.n} qubits")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    def with_s(self, s: float) -> AFMInstance:
        return AFMInstance(self.n, self.edges, s)

    def edges_text(self) -> str:
        return format_edges(self.edges)


def format_edges(edges) -> str:
    return ",".join(f"{i}-{j}" for i, j in edges)


def parse_edges(text: str) -> tuple[tuple[int, int], ...]:
    """Parse ``"0-1,1-2,2-0"`` into index pairs."""
    edges = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            a, b = chunk.split("-")
            edges.append((int(a), int(b)))
        except ValueError:
            raise ValueError(f"malformed edge {chunk!r}; expected 'i-j'") from None
    return tuple(edges)


def _label(n: int, qubits, axis: str) -> str:
    chars = ["I"] * n
    for q in qubits:
        chars[q] = axis
    return "".join(chars)


def afm_hamiltonian(inst: AFMInstance) -> PauliOperator:
    """``s sum Z_i + s(1-s) sum_edges Z_i Z_j + s sum_edges X_i X_j``.

    Each edge of the coupling graph contributes once.
    """
    n, s = inst.n, inst.s
    terms: list[tuple[str, float]] = [(_label(n, [i], "Z"), s) for i in range(n)]
    terms += [(_label(n, e, "Z"), s * (1.0 - s)) for e in inst.edges]
    terms += [(_label(n, e, "X"), s) for e in inst.edges]
    return PauliOperator(n, terms)


def random_afm_instance(n: int, degree: int = 2, seed: int = DEFAULT_SEED, s: float = 0.8) -> AFMInstance:
    """Seeded connected ``degree``-regular coupling graph on ``n`` qubits."""
    if degree < 1 or degree >= n:
        raise ValueError(f"degree {degree} infeasible for {n} qubits")
    if (degree * n) % 2:
        raise ValueError("degree * n must be even")
    rng = random.Random(seed)
    for _ in range(1000):
        g = nx.random_regular_graph(degree, n, seed=rng)
        if nx.is_connected(g):
            return AFMInstance(n, tuple(g.edges()), s)
    raise ValueError(f"no connected {degree}-regular graph found on {n} qubits")


def default_instance(s: float = 0.8, seed: int = DEFAULT_SEED) -> AFMInstance:
    """Seeded 12-qubit ring used as the stand-in benchmark."""
    return random_afm_instance(12, 2, seed, s)


def ghz_state(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be positive")
    psi = np.zeros(1 << n)
    psi[0] = psi[-1] = 1.0 / np.sqrt(2.0)
    return psi


def single_spin_boson(delta: float = 1.0) -> PauliOperator:
    """Tunneling term ``delta X`` of a single qubit."""
    return PauliOperator(1, {"X": delta})
