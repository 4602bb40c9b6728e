"""
Husimi Q distributions on quadrature grids.

Q values are coherent-state matrix elements of the state, scaled so the
quadrature sum over each sphere equals one:

    Q(Omega)            = (2s+1)/(4*pi) <Omega| rho |Omega>          (one spin)
    Q(Omega_A, Omega_B) = ((2s+1)/(4*pi))^2 <Omega_A Omega_B| rho |Omega_A Omega_B>

Tables are dense arrays over grid nodes. The expensive part of a pure-state
table is two matrix products against the per-(spin, grid) coherent
amplitude table, which is built once and cached.
"""

import warnings
from dataclasses import dataclass
from functools import lru_cache
from math import pi

import numpy as np

from .spin_core import SpinLength, TwoSpinState
from .sphere import SlotPartition, SphereGrid

__all__ = [
    "QTable1",
    "QTable2",
    "amplitude_table",
    "q_single",
    "q_joint",
    "q_mixture_deviation",
    "reduced_density",
]


@lru_cache(maxsize=64)
def amplitude_table(s: SpinLength, grid: SphereGrid) -> np.ndarray:
    """Coherent amplitudes <m|Omega_node>, shape (dim, n_nodes), cached per (s, grid)."""
    from .spin_core import coherent_amplitude_table

    table = coherent_amplitude_table(s, grid.theta, grid.phi)
    table.flags.writeable = False
    return table


def _require_exact(grid: SphereGrid, s: SpinLength, name: str):
    if grid.degree < 2 * s.two_s:
        raise ValueError(
            f"{name} has quadrature degree {grid.degree}, "
            f"needs >= {2 * s.two_s} to be exact for s = {s}"
        )


def _spin_from_dim(dim: int) -> SpinLength:
    return SpinLength(dim - 1)


@dataclass(eq=False)
class QTable1:
    """Single-spin Q on a grid; quadrature sum equals one."""

    s: SpinLength
    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        self.values.flags.writeable = False
        total = self.integral()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"Q table normalization off by {total - 1.0:.3e}")

    def integral(self) -> float:
        return float(np.sum(self.grid.weight * self.values))


@dataclass(eq=False)
class QTable2:
    """Joint two-spin Q on a grid pair; double quadrature sum equals one."""

    s: SpinLength
    grid_a: SphereGrid
    grid_b: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        self.values.flags.writeable = False
        total = self.integral()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"joint Q table normalization off by {total - 1.0:.3e}")

    def integral(self) -> float:
        return float(self.grid_a.weight @ self.values @ self.grid_b.weight)


def q_single(rho: np.ndarray, grid: SphereGrid) -> QTable1:
    """Q of a one-spin density operator."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density operator must be square, got shape {rho.shape}")
    s = _spin_from_dim(rho.shape[0])
    _require_exact(grid, s, "grid")
    if abs(np.trace(rho).real - 1.0) > 1e-9:
        raise ValueError("density operator must have unit trace")
    table = amplitude_table(s, grid)
    values = np.einsum("mk,mk->k", table.conj(), rho @ table).real * (s.dim / (4 * pi))
    return QTable1(s, grid, values)


def _q_pure_values(psi_matrix, table_a, table_b, scale) -> np.ndarray:
    # two dense products: (nodes_a x dim) . (dim x dim) . (dim x nodes_b)
    f = table_a.conj().T @ psi_matrix @ table_b.conj()
    return scale * (f.real**2 + f.imag**2)


def q_joint(state, grid_a: SphereGrid, grid_b: SphereGrid) -> QTable2:
    """Joint Q of a two-spin pure state or density operator.

    Mixed states go through an eigendecomposition, skipping numerically
    zero weights; slightly negative weights beyond -1e-9 are rejected.
    """
    if isinstance(state, TwoSpinState):
        s = state.s
        _require_exact(grid_a, s, "grid_a")
        _require_exact(grid_b, s, "grid_b")
        scale = (s.dim / (4 * pi)) ** 2
        values = _q_pure_values(
            state.matrix(), amplitude_table(s, grid_a), amplitude_table(s, grid_b), scale
        )
        return QTable2(s, grid_a, grid_b, values)

    rho = np.asarray(state, dtype=complex)
    dim2 = rho.shape[0]
    dim = round(dim2**0.5)
    if rho.shape != (dim2, dim2) or dim * dim != dim2:
        raise ValueError(f"expected a two-spin density operator, got shape {rho.shape}")
    s = _spin_from_dim(dim)
    _require_exact(grid_a, s, "grid_a")
    _require_exact(grid_b, s, "grid_b")
    if abs(np.trace(rho).real - 1.0) > 1e-9:
        raise ValueError("density operator must have unit trace")
    evals, evecs = np.linalg.eigh((rho + rho.conj().T) / 2)
    if evals.min() < -1e-9:
        raise ValueError(f"density operator not positive: min eigenvalue {evals.min():.3e}")
    scale = (s.dim / (4 * pi)) ** 2
    table_a = amplitude_table(s, grid_a)
    table_b = amplitude_table(s, grid_b)
    values = np.zeros((grid_a.n_nodes, grid_b.n_nodes))
    keep = evals > max(evals.max(), 1.0) * 1e-14
    for lam, vec in zip(evals[keep], evecs[:, keep].T):
        values += lam * _q_pure_values(vec.reshape(dim, dim), table_a, table_b, scale)
    return QTable2(s, grid_a, grid_b, values)


def reduced_density(state, party: str) -> np.ndarray:
    """Partial trace of a two-spin state onto party 'a' or 'b'."""
    if isinstance(state, TwoSpinState):
        psi = state.matrix()
        if party == "a":
            return psi @ psi.conj().T
        if party == "b":
            return psi.T @ psi.conj()
    else:
        rho = np.asarray(state, dtype=complex)
        dim = round(rho.shape[0] ** 0.5)
        rho4 = rho.reshape(dim, dim, dim, dim)
        if party == "a":
            return np.einsum("abcb->ac", rho4)
        if party == "b":
            return np.einsum("abac->bc", rho4)
    raise ValueError(f"party must be 'a' or 'b', got {party!r}")


def q_mixture_deviation(
    state,
    partition_a: SlotPartition,
    partition_b: SlotPartition,
    *,
    min_probability: float = 1e-12,
) -> float:
    """Distance between the joint Q and its outcome-conditioned mixture.

    Builds the coarse measurement for each partition, conditions the state
    on every outcome pair through the measurement's back-action, and
    returns

        0.5 * sum_ab w_a w_b | Q(a,b) - sum_mn p(m,n) Q^(mn)(a,b) |

    which lies in [0, 1]. Outcome pairs below min_probability are skipped
    (their conditional state is undefined) and reported via a warning.
    """
    from . import coarse_povm

    if isinstance(state, TwoSpinState):
        s = state.s
    else:
        s = _spin_from_dim(round(np.asarray(state).shape[0] ** 0.5))
    _require_exact(partition_a.grid, s, "partition_a grid")
    _require_exact(partition_b.grid, s, "partition_b grid")
    elements_a = coarse_povm.povm_elements(partition_a, s)
    elements_b = coarse_povm.povm_elements(partition_b, s)
    kraus_a = [coarse_povm.kraus_from_povm(p) for p in elements_a]
    kraus_b = [coarse_povm.kraus_from_povm(p) for p in elements_b]

    # pure components (weight, dim x dim matrix): the state itself counts
    # positive, every outcome-conditioned component counts negative; the
    # conditioned matrices stay unnormalized so each carries its own p(m, n)
    def pure_components(operator, sign):
        if isinstance(operator, TwoSpinState):
            return [(sign, operator.matrix())]
        rho = np.asarray(operator, dtype=complex)
        evals, evecs = np.linalg.eigh((rho + rho.conj().T) / 2)
        if evals.min() < -1e-9:
            raise ValueError(f"density operator not positive: min eigenvalue {evals.min():.3e}")
        keep = evals > max(evals.max(), 1.0) * 1e-14
        dim = round(rho.shape[0] ** 0.5)
        return [
            (sign * lam, vec.reshape(dim, dim)) for lam, vec in zip(evals[keep], evecs[:, keep].T)
        ]

    pure = isinstance(state, TwoSpinState)
    if not pure:
        state = np.asarray(state, dtype=complex)
        if abs(np.trace(state).real - 1.0) > 1e-9:
            raise ValueError("density operator must have unit trace")
    components = pure_components(state, 1.0)
    skipped = []
    for m, ka in enumerate(kraus_a):
        for n, kb in enumerate(kraus_b):
            if pure:
                cond = ka @ state.matrix() @ kb.T
                w = float(np.sum(cond.real**2 + cond.imag**2))
                if w <= min_probability:
                    skipped.append((m, n))
                    continue
                components.append((-1.0, cond))
            else:
                kab = np.kron(ka, kb)
                cond = kab @ state @ kab.conj().T
                w = float(np.trace(cond).real)
                if w <= min_probability:
                    skipped.append((m, n))
                    continue
                components.extend(pure_components(cond, -1.0))
    if skipped:
        warnings.warn(
            f"skipped outcome pairs below probability {min_probability:g}: {skipped}",
            RuntimeWarning,
            stacklevel=2,
        )

    # accumulate 0.5 * sum_ab wa wb |Q - mixture| in blocks of first-party
    # nodes; full tables for both spheres at once can run to gigabytes
    table_a = amplitude_table(s, partition_a.grid)
    table_bc = amplitude_table(s, partition_b.grid).conj()
    weight_a = partition_a.grid.weight
    weight_b = partition_b.grid.weight
    scale = (s.dim / (4 * pi)) ** 2
    n_a = partition_a.grid.n_nodes
    block = max(1, 4_000_000 // partition_b.grid.n_nodes)
    total = 0.0
    for start in range(0, n_a, block):
        rows = slice(start, min(start + block, n_a))
        left = table_a[:, rows].conj().T
        acc = None
        for weight, mat in components:
            f = (left @ mat) @ table_bc
            term = f.real**2
            term += f.imag**2
            acc = weight * term if acc is None else acc + weight * term
        total += weight_a[rows] @ np.abs(acc) @ weight_b
    return 0.5 * scale * float(total)
