"""
Coarse-grained measurements from slot partitions.

Each slot k of a partition becomes the positive operator

    P_k = (2s+1)/(4*pi) * sum_{nodes in k} w_node |Omega_node><Omega_node|

so completeness holds to rounding on any grid that resolves the identity,
and positivity is automatic. Measurement back-action uses the Hermitian
square root of each element as its Kraus operator.

Joint outcome tables can be computed two ways, as an operator trace or by
summing the joint Q table over slot pairs; on a shared grid the two routes
agree to rounding because they sum the same node terms.
"""

import warnings
from dataclasses import dataclass
from math import pi

import numpy as np

from . import husimi
from .errors import QuadratureTooCoarseError, UndefinedReductionError
from .spin_core import SpinLength, TwoSpinState
from .sphere import SlotPartition, partition_intersection

__all__ = [
    "PovmElement",
    "JointOutcomeTable",
    "HiddenJointTable",
    "povm_elements",
    "kraus_from_povm",
    "joint_probabilities",
    "reduced_state",
    "hidden_joint_distribution",
]


@dataclass(eq=False)
class PovmElement:
    """One positive effect of a slot measurement, with its slot provenance."""

    s: SpinLength
    slot: int
    matrix: np.ndarray
    partition: SlotPartition = None

    def __post_init__(self):
        self.matrix.flags.writeable = False


def povm_elements(partition: SlotPartition, s: SpinLength) -> list:
    """Slot effects for a spin-s system, one per partition slot."""
    grid = partition.grid
    husimi._require_exact(grid, s, "partition grid")
    table = husimi.amplitude_table(s, grid)
    scale = s.dim / (4 * pi)
    elements = []
    for k in range(partition.n_slots):
        idx = partition.slot_nodes(k)
        block = table[:, idx]
        p = scale * ((block * grid.weight[idx]) @ block.conj().T)
        p = (p + p.conj().T) / 2
        elements.append(PovmElement(s, k, p, partition))
    return elements


def kraus_from_povm(element: PovmElement) -> np.ndarray:
    """Hermitian square root of a POVM element.

    Eigenvalues in [-1e-10, 0) are clamped to zero; anything below -1e-8
    means the quadrature cannot represent the effect and is an error.
    """
    evals, evecs = np.linalg.eigh(element.matrix)
    if evals.min() < -1e-8:
        raise QuadratureTooCoarseError(
            f"POVM element slot {element.slot} has eigenvalue {evals.min():.3e}; "
            "refine the quadrature grid"
        )
    evals = np.clip(evals, 0.0, None)
    return (evecs * np.sqrt(evals)) @ evecs.conj().T


@dataclass(eq=False)
class JointOutcomeTable:
    """Outcome-pair probabilities for one measurement on each party."""

    probabilities: np.ndarray
    route: str

    def __post_init__(self):
        w = self.probabilities
        if w.min() < -1e-12:
            warnings.warn(
                f"clamping joint probability {w.min():.3e} to zero", RuntimeWarning, stacklevel=3
            )
        w = np.clip(w, 0.0, None)
        total = w.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"joint probabilities sum to {total!r}, expected 1")
        w.flags.writeable = False
        object.__setattr__(self, "probabilities", w)


def _as_pure_or_density(state):
    if isinstance(state, TwoSpinState):
        return state.s, state.matrix(), None
    rho = np.asarray(state, dtype=complex)
    dim = round(rho.shape[0] ** 0.5)
    if rho.shape != (dim * dim, dim * dim):
        raise ValueError(f"expected a two-spin state, got shape {rho.shape}")
    return SpinLength(dim - 1), None, rho


def joint_probabilities(state, povm_a: list, povm_b: list, route: str = "trace") -> JointOutcomeTable:
    """Outcome-pair table w[m, n] for slot measurements on both parties.

    route 'trace' evaluates Tr[rho P_m x P_n]; route 'q-integration' sums
    the joint Q table over the slot pairs (this needs the elements' slot
    provenance). Both land on the same numbers to rounding.
    """
    s, psi, rho = _as_pure_or_density(state)
    for element in (*povm_a, *povm_b):
        if element.s != s:
            raise ValueError("POVM elements built for a different spin length")

    if route == "trace":
        pa = np.stack([p.matrix for p in povm_a])
        pb = np.stack([p.matrix for p in povm_b])
        if psi is not None:
            w = np.einsum("ij,mik,kl,njl->mn", psi.conj(), pa, psi, pb, optimize=True).real
        else:
            rho4 = rho.reshape(s.dim, s.dim, s.dim, s.dim)
            w = np.einsum("abcd,mca,ndb->mn", rho4, pa, pb, optimize=True).real
        return JointOutcomeTable(w, route)

    if route == "q-integration":
        part_a = povm_a[0].partition
        part_b = povm_b[0].partition
        if part_a is None or part_b is None:
            raise ValueError("q-integration needs elements that carry their partition")
        if any(p.partition is not part_a for p in povm_a) or any(
            p.partition is not part_b for p in povm_b
        ):
            raise ValueError("q-integration needs all elements from one partition per party")
        q = husimi.q_joint(state, part_a.grid, part_b.grid)
        weighted = part_a.grid.weight[:, None] * q.values * part_b.grid.weight[None, :]
        w = part_a.onehot().T @ weighted @ part_b.onehot()
        return JointOutcomeTable(w, route)

    raise ValueError(f"unknown route {route!r}")


def reduced_state(state, kraus_a: list, kraus_b: list, m: int, n: int,
                  *, min_probability: float = 1e-12) -> np.ndarray:
    """Normalized post-measurement density operator for outcome pair (m, n).

    Applies M_m x M_n and renormalizes; outcomes with probability at or
    below min_probability have no defined conditional state.
    """
    s, psi, rho = _as_pure_or_density(state)
    ka, kb = kraus_a[m], kraus_b[n]
    if psi is not None:
        cond = ka @ psi @ kb.T
        w = float(np.sum(cond.real**2 + cond.imag**2))
        if w <= min_probability:
            raise UndefinedReductionError(
                f"outcome ({m}, {n}) has probability {w:.3e} <= {min_probability:g}"
            )
        vec = cond.ravel() / np.sqrt(w)
        return np.outer(vec, vec.conj())
    kab = np.kron(ka, kb)
    cond = kab @ rho @ kab.conj().T
    w = float(np.trace(cond).real)
    if w <= min_probability:
        raise UndefinedReductionError(
            f"outcome ({m}, {n}) has probability {w:.3e} <= {min_probability:g}"
        )
    return cond / w


@dataclass(eq=False)
class HiddenJointTable:
    """Joint distribution over two alternative slot measurements per party.

    probabilities[m, m_bar, n, n_bar] is built from the intersection
    partitions, so all four index positions marginalize consistently.
    """

    probabilities: np.ndarray

    def __post_init__(self):
        p = self.probabilities
        if p.min() < -1e-12:
            warnings.warn(
                f"clamping hidden joint probability {p.min():.3e} to zero",
                RuntimeWarning,
                stacklevel=3,
            )
        p = np.clip(p, 0.0, None)
        total = p.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"hidden joint probabilities sum to {total!r}, expected 1")
        p.flags.writeable = False
        object.__setattr__(self, "probabilities", p)

    def marginal_first(self) -> np.ndarray:
        """w[m, n] for the (partition_a, partition_b) pair."""
        return self.probabilities.sum(axis=(1, 3))

    def marginal_second(self) -> np.ndarray:
        """w[m_bar, n_bar] for the (alt_a, alt_b) pair."""
        return self.probabilities.sum(axis=(0, 2))


def hidden_joint_distribution(
    state,
    partition_a: SlotPartition,
    alt_a: SlotPartition,
    partition_b: SlotPartition,
    alt_b: SlotPartition,
) -> HiddenJointTable:
    """Joint table over both slot labelings on each party at once.

    Q is non-negative, so binning it over intersection slots yields a
    bona fide joint distribution whose marginals reproduce every
    single-pair outcome table.
    """
    s, _, _ = _as_pure_or_density(state)
    inter_a = partition_intersection(partition_a, alt_a)
    inter_b = partition_intersection(partition_b, alt_b)
    q = husimi.q_joint(state, partition_a.grid, partition_b.grid)
    weighted = partition_a.grid.weight[:, None] * q.values * partition_b.grid.weight[None, :]
    cells = inter_a.onehot().T @ weighted @ inter_b.onehot()
    out = np.zeros((partition_a.n_slots, alt_a.n_slots, partition_b.n_slots, alt_b.n_slots))
    for i, (m, m_bar) in enumerate(inter_a.parent_pairs):
        for j, (n, n_bar) in enumerate(inter_b.parent_pairs):
            out[m, m_bar, n, n_bar] = cells[i, j]
    return HiddenJointTable(out)
