"""
Finite-dimensional spin-s building blocks.

Conventions, fixed once here and relied on by every other module:

* A spin length s is stored as the integer 2s, so half-integer spins stay
  exact. The Hilbert space dimension is 2s + 1.
* Basis states |m>, m = -s .. +s, are ordered by ascending m; index
  i = m + s. hbar = 1 throughout.
* Directions are polar/azimuthal pairs (theta, phi) with the unit vector
  (sin(theta) cos(phi), sin(theta) sin(phi), cos(theta)).
* Spin coherent state at (theta, phi):

      <m|Omega> = sqrt(C(2s, s+m)) cos^{s+m}(theta/2) sin^{s-m}(theta/2)
                  * exp(+i (s-m) phi)

  so the north pole state |s> carries no phi dependence. With this sign,
  rotation(s, dir) |s> equals the coherent state up to the global phase
  exp(-i s phi), and the coherent state is the +s eigenvector of
  spin_component(s, dir).
* Operators are plain complex ndarrays in the |m> basis.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "SpinLength",
    "SphereDirection",
    "TwoSpinState",
    "X_AXIS",
    "Y_AXIS",
    "Z_AXIS",
    "spin_x",
    "spin_y",
    "spin_z",
    "spin_raising",
    "spin_lowering",
    "spin_component",
    "wigner_small_d",
    "rotation",
    "cat_rotation",
    "coherent_amplitudes",
    "coherent_amplitude_table",
    "singlet_state",
    "macro_entangled_state",
    "angle_between",
]


@dataclass(frozen=True)
class SpinLength:
    """Spin quantum number s, stored exactly as the integer 2s."""

    two_s: int

    def __post_init__(self):
        if not isinstance(self.two_s, (int, np.integer)):
            raise TypeError(f"two_s must be an integer, got {type(self.two_s).__name__}")
        if self.two_s < 0:
            raise ValueError(f"two_s must be non-negative, got {self.two_s}")
        object.__setattr__(self, "two_s", int(self.two_s))

    @classmethod
    def from_spin(cls, s: float) -> "SpinLength":
        two_s = round(2 * s)
        if abs(2 * s - two_s) > 1e-9:
            raise ValueError(f"spin must be integer or half-integer, got {s}")
        return cls(two_s)

    @property
    def s(self) -> float:
        return self.two_s / 2

    @property
    def dim(self) -> int:
        return self.two_s + 1

    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers in ascending order."""
        return np.arange(self.dim) - self.s

    def __str__(self):
        return f"{self.two_s}/2" if self.two_s % 2 else f"{self.two_s // 2}"


@dataclass(frozen=True)
class SphereDirection:
    """Point on the unit sphere: polar angle in [0, pi], azimuth wrapped to [0, 2*pi)."""

    theta: float
    phi: float

    def __post_init__(self):
        theta = float(self.theta)
        if not 0.0 <= theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {theta}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", float(self.phi) % (2 * math.pi))

    @classmethod
    def from_vector(cls, v) -> "SphereDirection":
        v = np.asarray(v, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("zero vector has no direction")
        v = v / norm
        return cls(math.acos(max(-1.0, min(1.0, v[2]))), math.atan2(v[1], v[0]))

    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


Z_AXIS = SphereDirection(0.0, 0.0)
X_AXIS = SphereDirection(math.pi / 2, 0.0)
Y_AXIS = SphereDirection(math.pi / 2, math.pi / 2)


def angle_between(a: SphereDirection, b: SphereDirection) -> float:
    """Angle in [0, pi] between two directions."""
    dot = float(np.dot(a.unit_vector(), b.unit_vector()))
    return math.acos(max(-1.0, min(1.0, dot)))


# ---------------------------------------------------------------------------
# operators


def spin_z(s: SpinLength) -> np.ndarray:
    return np.diag(s.m_values()).astype(complex)


def spin_raising(s: SpinLength) -> np.ndarray:
    """S_+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>."""
    m = s.m_values()[:-1]
    op = np.zeros((s.dim, s.dim), dtype=complex)
    op[np.arange(1, s.dim), np.arange(s.dim - 1)] = np.sqrt(s.s * (s.s + 1) - m * (m + 1))
    return op

def spin_lowering(s: SpinLength) -> np.ndarray:
    return spin_raising(s).conj().T


def spin_x(s: SpinLength) -> np.ndarray:
    sp = spin_raising(s)
    return (sp + sp.conj().T) / 2


def spin_y(s: SpinLength) -> np.ndarray:
    sp = spin_raising(s)
    return (sp - sp.conj().T) / 2j


def spin_component(s: SpinLength, direction: SphereDirection) -> np.ndarray:
    """Spin projection n . S along the given direction.

    Hermitian with eigenvalues -s .. +s; the coherent state at the same
    direction is its top eigenvector.
    """
    n = direction.unit_vector()
    return n[0] * spin_x(s) + n[1] * spin_y(s) + n[2] * spin_z(s)


def wigner_small_d(s: SpinLength, beta: float) -> np.ndarray:
    """Rotation matrix d(beta) = exp(-i beta S_y) in the |m> basis (real).

    Evaluated by the explicit factorial sum with log-space interior terms,
    indexed [s+m', s+m] to match the ascending basis order.
    """
    two_s = s.two_s
    dim = s.dim
    ch = math.cos(beta / 2)
    sh = math.sin(beta / 2)
    # degenerate half-angles make the log-space sum ill-defined; both cases
    # collapse to a single surviving term
    if sh == 0.0:
        return np.eye(dim) * ch**two_s
    if ch == 0.0:
        d = np.zeros((dim, dim))
        for c in range(dim):
            d[two_s - c, c] = (-1.0) ** (two_s - c) * sh**two_s
        return d

    lg = gammaln(np.arange(two_s + 2) + 1.0)  # lg[n] = ln n!
    log_ch = math.log(abs(ch))
    log_sh = math.log(abs(sh))
    sign_ch = 1.0 if ch > 0 else -1.0
    sign_sh = 1.0 if sh > 0 else -1.0

    d = np.zeros((dim, dim))
    for r in range(dim):
        for c in range(dim):
            k = np.arange(max(0, c - r), min(c, two_s - r) + 1)
            if k.size == 0:
                continue
            e_ch = two_s - 2 * k + c - r
            e_sh = r - c + 2 * k
            log_mag = (
                0.5 * (lg[r] + lg[two_s - r] + lg[c] + lg[two_s - c])
                - lg[c - k] - lg[k] - lg[two_s - r - k] - lg[r - c + k]
                + e_ch * log_ch + e_sh * log_sh
            )
            sign = (-1.0) ** (r - c + k) * sign_ch**e_ch * sign_sh**e_sh
            d[r, c] = np.sum(sign * np.exp(log_mag))
    return d


def rotation(s: SpinLength, direction: SphereDirection) -> np.ndarray:
    """Unitary R = exp(-i phi S_z) exp(-i theta S_y).

    Maps |s> to the coherent state at the direction, up to the global phase
    exp(-i s phi); conjugating S_z gives spin_component at the direction.
    """
    phase = np.exp(-1j * direction.phi * s.m_values())
    return phase[:, None] * wigner_small_d(s, direction.theta)


def cat_rotation(s: SpinLength, alpha: float) -> np.ndarray:
    """Unitary mixing only the extremal pair: |s> -> cos(a)|s> + sin(a)|-s>.

    Acts as the identity on every |m| < s level. Needs dim >= 2.
    """
    if s.two_s == 0:
        raise ValueError("cat rotation needs two distinct extremal levels, got s = 0")
    lo, hi = 0, s.two_s  # indices of |-s> and |+s>
    u = np.eye(s.dim, dtype=complex)
    u[hi, hi] = math.cos(alpha)
    u[lo, hi] = math.sin(alpha)
    u[hi, lo] = -math.sin(alpha)
    u[lo, lo] = math.cos(alpha)
    return u


# ---------------------------------------------------------------------------
# states


def coherent_amplitude_table(s: SpinLength, thetas, phis) -> np.ndarray:
    """Amplitudes <m|Omega_j> for a batch of directions, shape (dim, n).

    Binomial weights go through log-gamma so large spins stay finite.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    two_s = s.two_s
    k = np.arange(two_s + 1)  # k = s + m
    ln_binom = gammaln(two_s + 1) - gammaln(k + 1) - gammaln(two_s - k + 1)
    ct = np.cos(thetas / 2)
    st = np.sin(thetas / 2)
    mag = np.exp(0.5 * ln_binom)[:, None] * ct[None, :] ** k[:, None] * st[None, :] ** (two_s - k)[:, None]
    phase = np.exp(1j * np.outer(two_s - k, phis))
    return mag * phase


def coherent_amplitudes(s: SpinLength, direction: SphereDirection) -> np.ndarray:
    """Spin coherent state pointing along the direction, as a dim-vector."""
    return coherent_amplitude_table(s, [direction.theta], [direction.phi])[:, 0]


@dataclass(frozen=True)
class TwoSpinState:
    """Pure state of two equal spins, amplitudes in m_A-major order."""

    s: SpinLength
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape == (self.s.dim, self.s.dim):
            amps = amps.ravel()
        if amps.shape != (self.s.dim**2,):
            raise ValueError(f"expected {self.s.dim**2} amplitudes, got shape {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"amplitudes must be unit norm, got {norm!r}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def matrix(self) -> np.ndarray:
        """Amplitudes as a (dim_A, dim_B) matrix."""
        return self.amplitudes.reshape(self.s.dim, self.s.dim)

    def density(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


def singlet_state(s: SpinLength) -> TwoSpinState:
    """Total-spin-zero state of two spin-s systems.

    Amplitude (-1)^(s-m) / sqrt(2s+1) on each |m, -m> pair; invariant under
    equal rotations of both parties.
    """
    dim = s.dim
    amps = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):  # i = s + m_A, partner index is 2s - i
        amps[i, s.two_s - i] = (-1.0) ** (s.two_s - i)
    amps /= math.sqrt(dim)
    return TwoSpinState(s, amps.ravel())


def macro_entangled_state(s: SpinLength) -> TwoSpinState:
    """Even superposition of the two opposed extremal product states.

    (|s, -s> + |-s, s>) / sqrt(2); requires s > 0 so the branches differ.
    """
    if s.two_s == 0:
        raise ValueError("macroscopic superposition needs s > 0")
    dim = s.dim
    amps = np.zeros((dim, dim), dtype=complex)
    amps[s.two_s, 0] = 1.0
    amps[0, s.two_s] = 1.0
    amps /= math.sqrt(2)
    return TwoSpinState(s, amps.ravel())
