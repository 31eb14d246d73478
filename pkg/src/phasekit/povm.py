"""Covariant POVM seeds and the discrete QFT-basis measurement."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .spectrum import CanonicalModel, _frozen

if TYPE_CHECKING:
    from .cost import CostSpec

HERMITIAN_TOL = 1e-10
PSD_TOL = -1e-9


@dataclass(frozen=True)
class SeedMatrix:
    """Seed ``chi = 2 pi D_0`` of a covariant POVM, in the ``|k>`` basis."""

    entries: np.ndarray

    def __post_init__(self):
        chi = np.asarray(self.entries, dtype=complex)
        if chi.ndim != 2 or chi.shape[0] != chi.shape[1]:
            raise ValueError("seed must be a square matrix")
        object.__setattr__(self, "entries", _frozen(chi))

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def ones(cls, q: int) -> "SeedMatrix":
        return cls(np.ones((q, q)))

    def to_json_obj(self) -> list:
        """Row-major nested list of ``[re, im]`` pairs."""
        return [[[float(z.real), float(z.imag)] for z in row] for row in self.entries]

    @classmethod
    def from_json_obj(cls, rows: list) -> "SeedMatrix":
        return cls(np.array([[complex(re, im) for re, im in row] for row in rows]))


@dataclass(frozen=True)
class SeedReport:
    ok: bool
    violations: list[str] = field(default_factory=list)
    min_eigenvalue: float = float("nan")


def optimal_seed(cost: "CostSpec", q: int) -> SeedMatrix:
    """``chi_hk = sign(c_|h-k|)`` with ``sign(0) = 1`` and unit diagonal.

    Coefficients past the end of the series count as zero.  Positivity is not
    guaranteed outside the Holevo class; run :func:`validate_seed`.
    """
    c = np.zeros(q)
    n = min(q, cost.coefficients.size)
    c[:n] = cost.coefficients[:n]
    signs = np.where(c >= 0, 1.0, -1.0)
    signs[0] = 1.0
    h, k = np.indices((q, q))
    return SeedMatrix(signs[np.abs(h - k)])


def validate_seed(seed: SeedMatrix) -> SeedReport:
    chi = seed.entries
    violations = []
    herm_err = np.max(np.abs(chi - chi.conj().T)) if chi.size else 0.0
    if herm_err > HERMITIAN_TOL:
        violations.append(f"not Hermitian (max asymmetry {herm_err:.3g})")
    diag_err = np.max(np.abs(np.diag(chi) - 1)) if chi.size else 0.0
    if diag_err > HERMITIAN_TOL:
        violations.append(f"diagonal not unit (max deviation {diag_err:.3g})")
    max_mod = np.max(np.abs(chi)) if chi.size else 0.0
    if max_mod > 1 + HERMITIAN_TOL:
        violations.append(f"entry modulus {max_mod:.6g} exceeds 1")
    lam_min = float(np.linalg.eigvalsh((chi + chi.conj().T) / 2)[0]) if chi.size else 0.0
    if lam_min < PSD_TOL:
        violations.append(f"not positive semidefinite (min eigenvalue {lam_min:.6g})")
    return SeedReport(not violations, violations, lam_min)


def random_valid_seeds(q: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Sample ``count`` feasible seeds as unit-diagonal rescalings of ``A A^dagger``."""
    a = rng.normal(size=(count, q, q)) + 1j * rng.normal(size=(count, q, q))
    b = a @ np.conj(np.swapaxes(a, 1, 2))
    d = 1 / np.sqrt(np.real(np.einsum("nii->ni", b)))
    chi = b * d[:, :, None] * d[:, None, :]
    idx = np.arange(q)
    chi[:, idx, idx] = 1.0
    return chi


@dataclass(frozen=True)
class DiscreteMeasurement:
    """Projective measurement on ``|phi_s> = q**-0.5 sum_k exp(i k phi_s) |k>``."""

    dimension: int

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ValueError("measurement dimension must be a positive integer")

    @property
    def phases(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.dimension) / self.dimension

    @property
    def states(self) -> np.ndarray:
        """Row ``s`` is ``|phi_s>``; built with ``k*s mod q`` to keep angles small."""
        q = self.dimension
        ks = np.outer(np.arange(q), np.arange(q)) % q
        return np.exp(2j * np.pi * ks / q) / np.sqrt(q)

    def projectors(self) -> np.ndarray:
        v = self.states
        return np.einsum("si,sj->sij", v, v.conj())


def discrete_measurement(q: int) -> DiscreteMeasurement:
    return DiscreteMeasurement(q)


def outcome_distribution(model: CanonicalModel, phi: float | np.ndarray) -> np.ndarray:
    """Born-rule probabilities ``Pr(s|phi)`` of the QFT-basis measurement.

    ``<phi_s| psi(phi)>`` is a length-``q`` DFT of ``x_k exp(i k phi)``, so this
    uses the FFT.  A vector of phases gives one row per phase.
    """
    phi = np.asarray(phi, dtype=float)
    q = model.q
    k = np.arange(q)
    psi = model.amplitudes * np.exp(1j * np.multiply.outer(np.mod(phi, 2 * np.pi), k))
    amps = np.fft.fft(psi, axis=-1) / np.sqrt(q)
    probs = np.abs(amps) ** 2
    return probs / probs.sum(axis=-1, keepdims=True)


def conditional_density(model: CanonicalModel, theta: float | np.ndarray) -> np.ndarray | float:
    """Density ``p(theta) = |sum_k x_k exp(i k theta)|**2 / 2 pi`` of the estimate error."""
    theta = np.asarray(theta, dtype=float)
    k = np.arange(model.q)
    amp = np.exp(1j * np.multiply.outer(theta, k)) @ model.amplitudes
    dens = np.abs(amp) ** 2 / (2 * np.pi)
    return float(dens) if dens.ndim == 0 else dens


def delta_identity_residual(q: int) -> float:
    """Max of ``|(1/q) sum_s exp(i n phi_s) - delta_n0|`` over ``|n| < q``."""
    n = np.arange(-q + 1, q)
    s = np.arange(q)
    angles = 2 * np.pi * (np.multiply.outer(n, s) % q) / q
    avg = np.exp(1j * angles).mean(axis=1)
    return float(np.max(np.abs(avg - (n == 0))))


def discretization_check(model: CanonicalModel, cost: "CostSpec", grid_points: int | None = None) -> tuple[float, float]:
    """Average cost of the continuous covariant POVM and of its ``q``-point restriction.

    Both integrals use the trapezoid rule on an equispaced grid, which is
    exact here because every integrand is a trigonometric polynomial of degree
    below the grid size.
    """
    q = model.q
    m = grid_points or 4 * max(q, cost.coefficients.size)
    grid = 2 * np.pi * np.arange(m) / m
    continuous = float(np.mean(2 * np.pi * conditional_density(model, grid) * cost.evaluate(grid)))

    meas = discrete_measurement(q)
    probs = outcome_distribution(model, grid)  # (m, q)
    errors = meas.phases[None, :] - grid[:, None]
    discrete = float(np.mean(np.sum(probs * cost.evaluate(errors), axis=1)))
    return continuous, discrete
