"""
Sphere quadrature grids and slot partitions.

The grid is a product rule: Gauss-Legendre nodes in cos(theta) times a
uniform azimuthal grid. Such a rule integrates any spherical polynomial of
degree min(2*n_theta - 1, n_phi - 1) exactly, which is what makes identity
resolutions and Q-table normalizations land at rounding level rather than
at some quadrature error floor.

Slot partitions label every grid node with an outcome cell. Labeling is
done on cos(angle-from-axis) directly, never through arccos, so boundary
ties resolve identically everywhere: a node exactly on a slot boundary
goes to the lower slot index (for hemispheres, the positive side).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .spin_core import SpinLength, SphereDirection

__all__ = [
    "SphereGrid",
    "SlotPartition",
    "gauss_legendre_grid",
    "hemisphere_partition",
    "polar_band_partition",
    "partition_intersection",
]


@dataclass(eq=False)
class SphereGrid:
    """Product quadrature grid on the unit sphere.

    Node arrays are flat (theta, phi, weight aligned); weights sum to 4*pi.
    Instances are immutable after construction and compared by identity.
    """

    theta: np.ndarray
    phi: np.ndarray
    weight: np.ndarray
    n_theta: int
    n_phi: int
    degree: int
    _xyz: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        for arr in (self.theta, self.phi, self.weight):
            arr.flags.writeable = False

    @property
    def n_nodes(self) -> int:
        return self.theta.size

    def unit_vectors(self) -> np.ndarray:
        """Node positions as an (n_nodes, 3) array, cached."""
        if self._xyz is None:
            st = np.sin(self.theta)
            xyz = np.column_stack((st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)))
            xyz.flags.writeable = False
            object.__setattr__(self, "_xyz", xyz)
        return self._xyz

    def integrate(self, values) -> float:
        return float(np.sum(self.weight * np.asarray(values)))


def gauss_legendre_grid(s: SpinLength, oversample: float = 1.0) -> SphereGrid:
    """Quadrature grid exact for all degree <= 4s products of spin-s kernels.

    n_theta >= ceil(oversample * (2s+1)) Gauss-Legendre nodes in cos(theta),
    n_phi >= ceil(oversample * (4s+2)) uniform azimuths. Small floors (2 and
    6) keep the lowest spins on a usable grid for slot geometry.
    """
    if oversample < 1.0:
        raise ValueError(f"oversample must be >= 1, got {oversample}")
    n_theta = max(math.ceil(oversample * (s.two_s + 1)), 2)
    n_phi = max(math.ceil(oversample * (2 * s.two_s + 2)), 6)
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    theta_1d = np.arccos(x)
    phi_1d = 2 * math.pi * np.arange(n_phi) / n_phi
    theta = np.repeat(theta_1d, n_phi)
    phi = np.tile(phi_1d, n_theta)
    weight = np.repeat(wx * (2 * math.pi / n_phi), n_phi)
    degree = min(2 * n_theta - 1, n_phi - 1)
    return SphereGrid(theta, phi, weight, n_theta, n_phi, degree)


@dataclass(eq=False)
class SlotPartition:
    """Assignment of every grid node to one of n_slots outcome cells.

    width is the nominal polar extent of a single slot, the knob the
    classicality sweeps vary. Intersections keep a map back to the parent
    slot pair that produced each refined slot.
    """

    grid: SphereGrid
    labels: np.ndarray
    n_slots: int
    descriptor: str
    width: float
    parent_pairs: np.ndarray = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.intp)
        if labels.shape != (self.grid.n_nodes,):
            raise ValueError("labels must assign every grid node")
        if labels.min() < 0 or labels.max() >= self.n_slots:
            raise ValueError("labels out of range")
        counts = np.bincount(labels, minlength=self.n_slots)
        if (counts == 0).any():
            empty = np.flatnonzero(counts == 0).tolist()
            raise ValueError(
                f"empty slots {empty} in {self.descriptor}; grid too coarse for this partition"
            )
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)

    def slot_nodes(self, k: int) -> np.ndarray:
        """Indices of the nodes carrying label k."""
        return np.flatnonzero(self.labels == k)

    def slot_weight(self, k: int) -> float:
        return float(np.sum(self.grid.weight[self.labels == k]))

    def onehot(self) -> np.ndarray:
        """Membership matrix, shape (n_nodes, n_slots), float."""
        out = np.zeros((self.grid.n_nodes, self.n_slots))
        out[np.arange(self.grid.n_nodes), self.labels] = 1.0
        return out


def _axis_label(axis: SphereDirection) -> str:
    return f"theta={axis.theta:.6g},phi={axis.phi:.6g}"


def hemisphere_partition(grid: SphereGrid, axis: SphereDirection) -> SlotPartition:
    """Two slots split by the sign of axis . Omega; the equator counts as positive."""
    dots = grid.unit_vectors() @ axis.unit_vector()
    labels = np.where(dots >= 0.0, 0, 1)
    return SlotPartition(grid, labels, 2, f"hemisphere({_axis_label(axis)})", math.pi)


def polar_band_partition(grid: SphereGrid, axis: SphereDirection, n_bands: int) -> SlotPartition:
    """Equal polar-angle bands about the axis; band 0 touches the axis.

    Boundary nodes go to the lower band index, which for two bands
    reproduces the hemisphere rule exactly.
    """
    if n_bands < 2:
        raise ValueError(f"n_bands must be >= 2, got {n_bands}")
    dots = grid.unit_vectors() @ axis.unit_vector()
    # band k covers angles [k, k+1] * pi/n; compare in the cosine domain so
    # exact boundary hits share the hemisphere tie rule
    edges = np.cos(math.pi * np.arange(1, n_bands) / n_bands)
    labels = (dots[:, None] < edges[None, :]).sum(axis=1)
    width = math.pi / n_bands
    return SlotPartition(grid, labels, n_bands, f"bands(n={n_bands},{_axis_label(axis)})", width)


def partition_intersection(p: SlotPartition, q: SlotPartition) -> SlotPartition:
    """Common refinement of two partitions of the same grid.

    Slots are the non-empty (label_p, label_q) pairs; parent_pairs[k] holds
    the pair a refined slot k came from.
    """
    if p.grid is not q.grid:
        raise ValueError("partitions must share one grid instance")
    codes = p.labels * q.n_slots + q.labels
    unique_codes, labels = np.unique(codes, return_inverse=True)
    pairs = np.column_stack((unique_codes // q.n_slots, unique_codes % q.n_slots))
    pairs.flags.writeable = False
    return SlotPartition(
        p.grid,
        labels,
        unique_codes.size,
        f"intersection({p.descriptor}, {q.descriptor})",
        min(p.width, q.width),
        parent_pairs=pairs,
    )
