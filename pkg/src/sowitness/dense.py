"""Dense-matrix route: explicit product-basis operators, a self-contained
cyclic Jacobi eigensolver, and product-state sampling.

Everything in this module is deliberately independent of the closed-form
level arithmetic in :mod:`sowitness.angular` / :mod:`sowitness.thermal`;
agreement between the two routes is part of the test contract, so nothing
here may call back into the level formulas (and the eigensolver may not
delegate to an external one).

Basis convention: the product space is ordered spin-major, index
``i = i_s * (2l+1) + i_l`` with ``m_s = s - i_s`` and ``m_l = l - i_l``,
i.e. both magnetic quantum numbers run downward from their maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .angular import HalfInt, SpinOrbitSystem

__all__ = [
    "ConvergenceError",
    "ProductStateSample",
    "GroundStateAnalysis",
    "angular_momentum_matrices",
    "build_hamiltonian",
    "jacobi_eigh",
    "eigen_spectrum",
    "thermal_mean_energy",
    "product_state_sample",
    "sample_product_state",
    "ground_state_analysis",
]


class ConvergenceError(RuntimeError):
    """The Jacobi sweep budget ran out before the off-diagonal norm target."""

    def __init__(self, message: str, residual: float) -> None:
        super().__init__(message)
        self.residual = residual


@lru_cache(maxsize=None)
def _ladder_triplet(twice_j: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cached (jz, j+, j-) for one momentum; arrays are frozen read-only."""
    dim = twice_j + 1
    jz = np.zeros((dim, dim))
    jplus = np.zeros((dim, dim))
    jj = twice_j * (twice_j + 2) / 4.0  # j(j+1), exact
    for k in range(dim):
        tm = twice_j - 2 * k  # 2*m, descending from +2j
        jz[k, k] = tm / 2.0
        if k > 0:
            # raising connects |j, m> to |j, m+1>, one row up
            jplus[k - 1, k] = math.sqrt(jj - tm * (tm + 2) / 4.0)
    jminus = jplus.T.copy()
    for a in (jz, jplus, jminus):
        a.flags.writeable = False
    return jz, jplus, jminus


def angular_momentum_matrices(j: HalfInt) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Matrices (Jz, J+, J-) on the 2j+1 basis states, m descending from +j.

    Entries are assembled from exact integer quarters, so e.g. the Casimir
    combination Jz^2 + (J+J- + J-J+)/2 reproduces j(j+1) to rounding error.
    """
    if not isinstance(j, HalfInt):
        raise TypeError("j must be a HalfInt")
    if j.twice < 0:
        raise ValueError(f"momentum must be non-negative, got j={j}")
    jz, jplus, jminus = _ladder_triplet(j.twice)
    return jz.copy(), jplus.copy(), jminus.copy()


def build_hamiltonian(system: SpinOrbitSystem) -> np.ndarray:
    """zeta * S.L as a real symmetric matrix on the spin-major product basis.

    S.L = Sz Lz + (S+ L- + S- L+)/2; the matrix is traceless because every
    factor operator is.
    """
    sz, splus, sminus = _ladder_triplet(system.s.twice)
    lz, lplus, lminus = _ladder_triplet(system.l.twice)
    return system.zeta * (
        np.kron(sz, lz) + 0.5 * (np.kron(splus, lminus) + np.kron(sminus, lplus))
    )


def jacobi_eigh(
    matrix: np.ndarray, *, rel_tol: float = 1e-13, max_sweeps: int = 50
) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a real symmetric matrix by cyclic Jacobi.

    Sweeps classical (p, q) rotations in row-cyclic order until the
    off-diagonal Frobenius norm drops below ``rel_tol`` times the Frobenius
    norm of the input.  Rotations whose pivot is already far below the
    target are skipped; the skip threshold is small enough that an
    all-skip sweep implies convergence, so the loop cannot stall.

    Returns (eigenvalues ascending, eigenvectors as matching columns).
    """
    a = np.array(matrix, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    n = a.shape[0]
    scale = float(np.max(np.abs(a))) if n else 0.0
    if scale and float(np.max(np.abs(a - a.T))) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    vectors = np.eye(n)
    norm = math.sqrt(float(np.sum(a * a)))
    if norm == 0.0:
        return np.zeros(n), vectors
    target = rel_tol * norm
    # If every pivot is below this, the total off-diagonal norm is already
    # under target/10, so skipping all of them never prevents convergence.
    skip = target / (10.0 * n)
    off = norm
    for _ in range(max_sweeps):
        for p in range(n - 1):
            for q in range(p + 1, n):
                pivot = a[p, q]
                if abs(pivot) <= skip:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * pivot)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                vec_p, vec_q = vectors[:, p].copy(), vectors[:, q].copy()
                vectors[:, p] = c * vec_p - s * vec_q
                vectors[:, q] = s * vec_p + c * vec_q
        hollow = a.copy()
        np.fill_diagonal(hollow, 0.0)
        off = math.sqrt(float(np.sum(hollow * hollow)))
        if off <= target:
            order = np.argsort(np.diag(a), kind="stable")
            return np.diag(a)[order].copy(), vectors[:, order].copy()
    raise ConvergenceError(
        f"no convergence after {max_sweeps} sweeps: off-diagonal norm "
        f"{off:.3e} > target {target:.3e}",
        residual=off,
    )


def eigen_spectrum(operator: np.ndarray) -> np.ndarray:
    """Eigenvalues (ascending) of a Hermitian operator.

    Real symmetric input is diagonalized directly; genuinely complex
    Hermitian input goes through the standard real embedding
    [[Re, -Im], [Im, Re]], whose spectrum is that of the original matrix
    with every eigenvalue doubled.
    """
    a = np.asarray(operator)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"operator must be square, got shape {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0:
        return np.zeros(a.shape[0])
    if float(np.max(np.abs(a - a.conj().T))) > 1e-12 * scale:
        raise ValueError("operator is not Hermitian")
    if np.iscomplexobj(a) and float(np.max(np.abs(a.imag))) > 0.0:
        real, imag = a.real, a.imag
        embedded = np.block([[real, -imag], [imag, real]])
        doubled, _ = jacobi_eigh(embedded)
        return 0.5 * (doubled[0::2] + doubled[1::2])
    values, _ = jacobi_eigh(a.real if np.iscomplexobj(a) else a)
    return values


@lru_cache(maxsize=128)
def _spectrum_of(system: SpinOrbitSystem) -> np.ndarray:
    values = eigen_spectrum(build_hamiltonian(system))
    values.flags.writeable = False
    return values


@lru_cache(maxsize=128)
def _hamiltonian_of(system: SpinOrbitSystem) -> np.ndarray:
    h = build_hamiltonian(system)
    h.flags.writeable = False
    return h


def thermal_mean_energy(system: SpinOrbitSystem, temperature: float) -> float:
    """Gibbs mean energy over all (2s+1)(2l+1) eigenvalues.

    Every eigenvalue enters with unit weight, so this is by construction
    the multiplet-degenerate convention whatever tag the system carries.
    """
    if not temperature > 0.0:
        raise ValueError(f"temperature must be positive, got {temperature!r}")
    values = _spectrum_of(system)
    weights = np.exp(-(values - values[0]) / temperature)
    return float(np.sum(weights * values) / np.sum(weights))


@dataclass(frozen=True, eq=False)
class ProductStateSample:
    """A product state |spin> x |orbital> and its derived observables."""

    spin_state: np.ndarray
    orbital_state: np.ndarray
    spin_vector: np.ndarray
    orbital_vector: np.ndarray
    cos_angle: float
    energy: float


@lru_cache(maxsize=None)
def _cartesian_triplet(twice_j: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    jz, jplus, jminus = _ladder_triplet(twice_j)
    jx = 0.5 * (jplus + jminus)
    jy = -0.5j * (jplus - jminus)
    jx.flags.writeable = False
    jy.flags.writeable = False
    return jx, jy, jz


def _bloch_vector(twice_j: int, state: np.ndarray) -> np.ndarray:
    return np.array(
        [float(np.real(np.vdot(state, op @ state))) for op in _cartesian_triplet(twice_j)]
    )


def product_state_sample(
    system: SpinOrbitSystem, spin_state: np.ndarray, orbital_state: np.ndarray
) -> ProductStateSample:
    """Evaluate <S>, <L>, their angle, and <H> for one product state.

    States are normalized defensively; the energy is the honest matrix
    expectation <psi| H |psi> on the product vector, not any factorized
    shortcut, so the identity <H> = zeta <S>.<L> is something this
    function exhibits rather than assumes.
    """
    spin = np.asarray(spin_state, dtype=complex)
    orbital = np.asarray(orbital_state, dtype=complex)
    if spin.shape != (system.s.twice + 1,) or orbital.shape != (system.l.twice + 1,):
        raise ValueError("factor state dimensions do not match the system")
    spin = spin / np.linalg.norm(spin)
    orbital = orbital / np.linalg.norm(orbital)
    spin_vec = _bloch_vector(system.s.twice, spin)
    orbital_vec = _bloch_vector(system.l.twice, orbital)
    product = np.kron(spin, orbital)
    energy = float(np.real(np.vdot(product, _hamiltonian_of(system) @ product)))
    norms = np.linalg.norm(spin_vec) * np.linalg.norm(orbital_vec)
    cos_angle = float(np.dot(spin_vec, orbital_vec) / norms) if norms > 1e-12 else 0.0
    for a in (spin, orbital, spin_vec, orbital_vec):
        a.flags.writeable = False
    return ProductStateSample(spin, orbital, spin_vec, orbital_vec, cos_angle, energy)


def sample_product_state(
    system: SpinOrbitSystem, rng: np.random.Generator
) -> ProductStateSample:
    """Draw a Haar-random product state (spin factor first, then orbital).

    Each factor is a complex standard-normal vector, normalized; that is
    exactly the uniform distribution on the factor's state sphere.
    """
    return product_state_sample(
        system, _random_unit(rng, system.s.twice + 1), _random_unit(rng, system.l.twice + 1)
    )


def _random_unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    while True:
        vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        norm = np.linalg.norm(vec)
        if norm > 1e-6:
            return vec / norm


@dataclass(frozen=True, eq=False)
class GroundStateAnalysis:
    """Ground energy, its degeneracy, and (if unique) the Schmidt data."""

    energy: float
    degeneracy: int
    schmidt_spectrum: np.ndarray | None
    entropy: float | None


def ground_state_analysis(system: SpinOrbitSystem) -> GroundStateAnalysis:
    """Diagonalize H and, for a unique ground state, extract its Schmidt spectrum.

    Degeneracy counts eigenvalues within 1e-6 |zeta| of the minimum.  For a
    unique ground state the orbital factor is traced out; the Schmidt
    spectrum is the (descending) eigenvalue list of the reduced spin
    density matrix and the entropy is reported in nats.
    """
    if system.zeta == 0.0:
        raise ValueError("ground-state analysis requires a nonzero coupling")
    values, vectors = jacobi_eigh(build_hamiltonian(system))
    threshold = 1e-6 * abs(system.zeta)
    degeneracy = int(np.count_nonzero(values <= values[0] + threshold))
    if degeneracy != 1:
        return GroundStateAnalysis(float(values[0]), degeneracy, None, None)
    ground = vectors[:, 0].reshape(system.s.twice + 1, system.l.twice + 1)
    reduced = ground @ ground.T  # trace over the orbital factor
    schmidt_ascending, _ = jacobi_eigh(reduced)
    schmidt = np.clip(schmidt_ascending[::-1], 0.0, None).copy()
    positive = schmidt[schmidt > 0.0]
    entropy = float(-np.sum(positive * np.log(positive)))
    schmidt.flags.writeable = False
    return GroundStateAnalysis(float(values[0]), 1, schmidt, entropy)
