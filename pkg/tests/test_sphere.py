import numpy as np
import pytest

from qlab import (
    SphereDirection,
    SphereGrid,
    SpinLength,
    X_AXIS,
    Z_AXIS,
    gauss_legendre_grid,
    hemisphere_partition,
    partition_intersection,
    polar_band_partition,
)


def test_grid_shapes_and_total_weight():
    for two_s in (0, 1, 4, 15):
        for ov in (1.0, 2.5):
            g = gauss_legendre_grid(SpinLength(two_s), oversample=ov)
            assert g.theta.shape == g.phi.shape == g.weight.shape
            assert g.theta.size == g.n_theta * g.n_phi
            assert np.isclose(g.weight.sum(), 4 * np.pi, rtol=1e-14)
            assert not g.weight.flags.writeable
    # node-count floors hold even for spin zero
    g = gauss_legendre_grid(SpinLength(0), oversample=1.0)
    assert g.n_theta >= 2 and g.n_phi >= 6


def test_degree_grows_with_spin():
    for two_s in (1, 6, 13):
        g = gauss_legendre_grid(SpinLength(two_s), oversample=1.0)
        assert g.degree >= 2 * two_s


def test_polynomial_exactness():
    g = gauss_legendre_grid(SpinLength(4), oversample=1.0)
    c = np.cos(g.theta)
    # odd monomials in cos(theta) integrate to zero, even ones to 4pi/(k+1)
    for k in range(g.degree + 1):
        exact = 4 * np.pi / (k + 1) if k % 2 == 0 else 0.0
        assert np.isclose(g.integrate(c**k), exact, atol=1e-12)
    # azimuthal modes up to the degree vanish exactly
    for m in range(1, g.degree + 1):
        assert abs(g.integrate(np.cos(m * g.phi))) < 1e-11
        assert abs(g.integrate(np.sin(m * g.phi))) < 1e-11


def test_unit_vectors_cached_and_normalized():
    g = gauss_legendre_grid(SpinLength(2))
    v = g.unit_vectors()
    assert v.shape == (g.theta.size, 3)
    assert np.allclose(np.linalg.norm(v, axis=1), 1.0, atol=1e-14)
    assert g.unit_vectors() is v


def test_hemisphere_partition():
    g = gauss_legendre_grid(SpinLength(5), oversample=2.0)
    for axis in (Z_AXIS, SphereDirection(1.1, 0.8)):
        part = hemisphere_partition(g, axis)
        assert part.n_slots == 2
        assert np.isclose(part.width, np.pi)
        dots = g.unit_vectors() @ axis.unit_vector()
        assert np.array_equal(part.labels, (dots < 0).astype(part.labels.dtype))
        # the two slot weights cover the sphere
        assert np.isclose(part.slot_weight(0) + part.slot_weight(1), 4 * np.pi)


def test_band_partition_matches_hemispheres_at_two():
    g = gauss_legendre_grid(SpinLength(6), oversample=1.5)
    for axis in (Z_AXIS, X_AXIS, SphereDirection(0.6, 2.0)):
        hemis = hemisphere_partition(g, axis)
        bands = polar_band_partition(g, axis, 2)
        assert np.array_equal(hemis.labels, bands.labels)
    assert np.isclose(polar_band_partition(g, Z_AXIS, 2).width, np.pi / 2)


def test_band_labels_and_boundary_ties():
    # hand-built grid with nodes exactly on the band edges
    theta = np.array([0.0, np.pi / 3, np.pi / 2, 2 * np.pi / 3, np.pi])
    grid = SphereGrid(theta, np.zeros(5), np.full(5, 4 * np.pi / 5), 5, 1, 0)
    part = polar_band_partition(grid, Z_AXIS, 3)
    # a node on an edge belongs to the band nearer the axis
    assert list(part.labels) == [0, 0, 1, 1, 2]
    assert np.isclose(part.width, np.pi / 3)


def test_empty_slot_raises():
    g = gauss_legendre_grid(SpinLength(1), oversample=1.0)  # two polar rings
    with pytest.raises(ValueError):
        polar_band_partition(g, Z_AXIS, 12)


def test_onehot_and_slot_nodes():
    g = gauss_legendre_grid(SpinLength(3), oversample=2.0)
    part = polar_band_partition(g, Z_AXIS, 4)
    hot = part.onehot()
    assert hot.shape == (g.theta.size, 4)
    assert np.array_equal(hot.sum(axis=1), np.ones(g.theta.size))
    for k in range(4):
        assert np.array_equal(np.flatnonzero(hot[:, k]), part.slot_nodes(k))
        assert np.isclose(part.slot_weight(k), g.weight[part.slot_nodes(k)].sum())


def test_partition_intersection():
    g = gauss_legendre_grid(SpinLength(4), oversample=2.0)
    a = polar_band_partition(g, Z_AXIS, 2)
    b = polar_band_partition(g, SphereDirection(0.9, 0.3), 3)
    inter = partition_intersection(a, b)
    assert np.isclose(inter.width, min(a.width, b.width))
    # every intersection slot refines both parents
    assert inter.parent_pairs.shape == (inter.n_slots, 2)
    for k in range(inter.n_slots):
        ka, kb = inter.parent_pairs[k]
        nodes = inter.slot_nodes(k)
        assert np.array_equal(a.labels[nodes], np.full(nodes.size, ka))
        assert np.array_equal(b.labels[nodes], np.full(nodes.size, kb))
    # weights add back up to the parents'
    for ka in range(a.n_slots):
        mask = inter.parent_pairs[:, 0] == ka
        total = sum(inter.slot_weight(k) for k in np.flatnonzero(mask))
        assert np.isclose(total, a.slot_weight(ka))

    other = gauss_legendre_grid(SpinLength(4), oversample=2.0)
    with pytest.raises(ValueError):
        partition_intersection(a, polar_band_partition(other, Z_AXIS, 2))
