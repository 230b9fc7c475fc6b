"""Environment models: exponential dephasing, small explicit environments and
the NV-center 13C nuclear spin bath.

Bath spins are spin-1/2 with spin operators ``I = sigma / 2``.  For qubit
pointer state 0 a spin precesses under ``zeeman * I_z``; for pointer state 1
under ``zeeman * I_z + A . I``.  Without intra-bath couplings the
conditional propagators factorize over spins, so bath factors are products of
single-spin traces and cost O(n) per time point.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import kernels
from .dephasing import ConditionalPropagators, DephasingFactors, QubitEnvironment
from .linalg import ValidationError, check_dim, tensor_all
from .states import DensityMatrix

GAMMA_E_MHZ_PER_T = -28.08e3
GAMMA_N_MHZ_PER_T = 10.71

# mu0/(4 pi) * hbar * (2 pi)^2 in (rad/us) nm^3 / (MHz/T)^2
_DIPOLAR_PREFACTOR = 1e-7 * (2 * math.pi) ** 2 * 1.054571817e-34 * 1e12 / 1e-27 / 1e6

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

POLARIZATION_CONVENTIONS = ("spin", "pauli")


class BathTableError(ValueError):
    """Malformed bath coupling table."""


@dataclass(frozen=True)
class NuclearSpin:
    coupling: tuple[float, float, float]
    polarization: float = 0.0
    label: int = 0

    def __post_init__(self):
        coupling = tuple(float(a) for a in self.coupling)
        if len(coupling) != 3 or not all(math.isfinite(a) for a in coupling):
            raise ValidationError(f"coupling must be three finite numbers, got {self.coupling}")
        if not -1.0 <= float(self.polarization) <= 1.0:
            raise ValidationError(f"polarization must lie in [-1, 1], got {self.polarization}")
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "polarization", float(self.polarization))


@dataclass(frozen=True)
class SpinBathSpec:
    """One qubit's nuclear environment.

    ``polarization_convention`` fixes how ``p`` enters the spin state:
    ``"spin"`` gives ``(1 + p I_z) / 2`` with ``I_z = sigma_z / 2`` and
    ``"pauli"`` gives ``(1 + p sigma_z) / 2``, which is pure at ``p = 1``.
    """

    spins: tuple[NuclearSpin, ...]
    zeeman: float = 0.0
    distances: tuple[float, ...] | None = None
    polarization_convention: str = "spin"

    def __post_init__(self):
        spins = tuple(self.spins)
        if not spins:
            raise ValidationError("a spin bath needs at least one spin")
        if self.distances is not None and len(self.distances) != len(spins):
            raise ValidationError("distances must match the number of spins")
        if self.polarization_convention not in POLARIZATION_CONVENTIONS:
            raise ValidationError(f"unknown polarization convention {self.polarization_convention!r}")
        object.__setattr__(self, "spins", spins)
        object.__setattr__(self, "zeeman", float(self.zeeman))

    def __len__(self) -> int:
        return len(self.spins)

    @property
    def couplings(self) -> np.ndarray:
        return np.array([s.coupling for s in self.spins], dtype=np.float64)

    @property
    def bias(self) -> np.ndarray:
        """``Tr[rho_k sigma_z]`` for each spin."""
        scale = 0.5 if self.polarization_convention == "spin" else 1.0
        return np.array([scale * s.polarization for s in self.spins], dtype=np.float64)

    def with_polarization(self, polarization: float) -> "SpinBathSpec":
        spins = tuple(replace(s, polarization=polarization) for s in self.spins)
        return replace(self, spins=spins)

    def with_zeeman(self, zeeman: float) -> "SpinBathSpec":
        return replace(self, zeeman=zeeman)

    def subset(self, indices: Iterable[int]) -> "SpinBathSpec":
        indices = list(indices)
        distances = None if self.distances is None else tuple(self.distances[i] for i in indices)
        return replace(self, spins=tuple(self.spins[i] for i in indices), distances=distances)


@dataclass(frozen=True)
class ExponentialModel:
    """Memoryless dephasing with ``c(t) = exp(-rate t)`` and ``d^2 = c^2``."""

    rate: float

    def __post_init__(self):
        if not self.rate >= 0:
            raise ValidationError("rate must be non-negative")

    def factors(self, t: float) -> DephasingFactors:
        c = math.exp(-self.rate * t)
        return DephasingFactors(complex(c), complex(c * c), t)

    def time_for(self, c: float) -> float:
        """Time at which the decoherence factor equals ``c`` in (0, 1]."""
        if not 0.0 < c <= 1.0 or self.rate == 0:
            raise ValueError("need 0 < c <= 1 and a positive rate")
        return -math.log(c) / self.rate


def zeeman_frequency(magnetic_field_T: float, gamma_n: float = GAMMA_N_MHZ_PER_T, angular: bool = True) -> float:
    """Nuclear Larmor frequency in rad/us for a field in tesla.

    With ``angular=False`` the cyclic value ``gamma_n * B`` (MHz) is used
    directly as the generator coefficient.
    """
    f = gamma_n * magnetic_field_T
    return 2 * math.pi * f if angular else f


def _pauli_rotation(h: Sequence[float], t: float) -> np.ndarray:
    # exp(-i t h.sigma/2) = cos(|h|t/2) I - i sin(|h|t/2) n.sigma
    hx, hy, hz = h
    norm = math.sqrt(hx * hx + hy * hy + hz * hz)
    if norm == 0.0:
        return np.eye(2, dtype=np.complex128)
    half = 0.5 * norm * t
    s = math.sin(half) / norm
    return math.cos(half) * np.eye(2) - 1j * s * (hx * PAULI_X + hy * PAULI_Y + hz * PAULI_Z)


def spin_conditional_propagators(spin: NuclearSpin, zeeman: float, t: float) -> ConditionalPropagators:
    if t < 0:
        raise ValidationError("time must be non-negative")
    ax, ay, az = spin.coupling
    w0 = _pauli_rotation((0.0, 0.0, zeeman), t)
    w1 = _pauli_rotation((ax, ay, zeeman + az), t)
    return ConditionalPropagators(w0, w1, t)


def spin_initial_state(spin: NuclearSpin, convention: str = "spin") -> DensityMatrix:
    """Diagonal single-spin state; ``diag(1/2 + p/4, 1/2 - p/4)`` by default."""
    p = spin.polarization
    if not -1.0 <= p <= 1.0:
        raise ValidationError("polarization must lie in [-1, 1]")
    if convention not in POLARIZATION_CONVENTIONS:
        raise ValidationError(f"unknown polarization convention {convention!r}")
    s = 0.5 * p if convention == "spin" else p
    return DensityMatrix(np.diag([0.5 + 0.5 * s, 0.5 - 0.5 * s]).astype(np.complex128), (2,))


def bath_factor_series(bath: SpinBathSpec, times, backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Complex ``c(t)`` and two-process factors on a time grid."""
    times = np.asarray(times, dtype=np.float64)
    if np.any(times < 0):
        raise ValidationError("times must be non-negative")
    return kernels.bath_factor_grid(bath.couplings, bath.bias, bath.zeeman, times, backend=backend)


def bath_factors(bath: SpinBathSpec, t: float) -> DephasingFactors:
    c, d = bath_factor_series(bath, [t])
    return DephasingFactors(complex(c[0]), complex(d[0]), float(t))


def bath_state(bath: SpinBathSpec) -> DensityMatrix:
    """Product initial state of the whole bath (dimension 2^n)."""
    check_dim(2 ** len(bath))
    mats = [spin_initial_state(s, bath.polarization_convention).mat for s in bath.spins]
    return DensityMatrix(tensor_all(mats), (2,) * len(bath))


def bath_propagators(bath: SpinBathSpec, t: float) -> ConditionalPropagators:
    """Joint conditional propagators of the whole bath as tensor products."""
    check_dim(2 ** len(bath))
    per_spin = [spin_conditional_propagators(s, bath.zeeman, t) for s in bath.spins]
    return ConditionalPropagators(tensor_all(p.w0 for p in per_spin), tensor_all(p.w1 for p in per_spin), t)


def bath_environment(bath: SpinBathSpec, t: float) -> QubitEnvironment:
    """Explicit 2^n-dimensional environment for the joint engine."""
    return QubitEnvironment(bath_propagators(bath, t), bath_state(bath))


def bath_hamiltonians(bath: SpinBathSpec) -> tuple[np.ndarray, np.ndarray]:
    """Full 2^n-dimensional generators conditioned on pointer states 0 and 1."""
    n = len(bath)
    dim = 2 ** n
    check_dim(dim)
    h0 = np.zeros((dim, dim), dtype=np.complex128)
    h1 = np.zeros((dim, dim), dtype=np.complex128)
    for k, spin in enumerate(bath.spins):

        def embed(op, k=k):
            return tensor_all([op if j == k else np.eye(2) for j in range(n)])

        ix, iy, iz = embed(PAULI_X / 2), embed(PAULI_Y / 2), embed(PAULI_Z / 2)
        ax, ay, az = spin.coupling
        h0 += bath.zeeman * iz
        h1 += bath.zeeman * iz + ax * ix + ay * iy + az * iz
    return h0, h1


def dipolar_coupling(
    position: Sequence[float],
    gamma_e: float = GAMMA_E_MHZ_PER_T,
    gamma_n: float = GAMMA_N_MHZ_PER_T,
    form: str = "tensor",
) -> np.ndarray:
    """Hyperfine vector (A^{z,x}, A^{z,y}, A^{z,z}) in rad/us for a point dipole.

    ``position`` is the nucleus-qubit displacement in nm and the gyromagnetic
    ratios are cyclic (MHz/T).  The prefactor is
    ``mu0/(4 pi) * hbar * (2 pi gamma_e)(2 pi gamma_n) / r^3``.

    ``form="tensor"`` uses the dipolar tensor ``delta_{iz} - 3 r_i r_z / r^2``,
    which reproduces the bundled coupling table.  ``form="literal"`` applies
    ``1 - 3 r_i r_z / r^2`` to every component.
    """
    r = np.asarray(position, dtype=np.float64)
    if r.shape != (3,) or not np.all(np.isfinite(r)):
        raise ValidationError("position must be a finite 3-vector")
    dist = float(np.linalg.norm(r))
    if dist == 0.0:
        raise ValidationError("position must be nonzero")
    scale = _DIPOLAR_PREFACTOR * gamma_e * gamma_n / dist ** 3
    angular = 3.0 * r * r[2] / dist ** 2
    if form == "tensor":
        return scale * (np.array([0.0, 0.0, 1.0]) - angular)
    if form == "literal":
        return scale * (1.0 - angular)
    raise ValueError(f"unknown form {form!r}")


def _rows(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "," in stripped:
            cells = next(csv.reader(io.StringIO(stripped)))
        else:
            cells = stripped.split()
        yield lineno, [c.strip() for c in cells]


def load_bath_table(
    source: str,
    polarization: float = 0.0,
    zeeman: float = 0.0,
    polarization_convention: str = "spin",
) -> SpinBathSpec:
    """Parse a coupling table with columns ``k, r_nm, Ax, Ay, Az``.

    Comma- or whitespace-delimited; ``#`` starts a comment line; the first
    non-comment line is the header.  Numbers are parsed with ``float`` so the
    stored values equal the decimal text exactly as doubles.
    """
    rows = list(_rows(source))
    if not rows:
        raise BathTableError("empty bath table")
    header_line, header = rows[0]
    if [h.lower() for h in header] != ["k", "r_nm", "ax", "ay", "az"]:
        raise BathTableError(f"line {header_line}: expected header k,r_nm,Ax,Ay,Az, got {','.join(header)}")
    spins, distances = [], []
    for lineno, cells in rows[1:]:
        if len(cells) != 5:
            raise BathTableError(f"line {lineno}: expected 5 fields, got {len(cells)}")
        try:
            label = int(cells[0])
            r, ax, ay, az = (float(c) for c in cells[1:])
        except ValueError as exc:
            raise BathTableError(f"line {lineno}: non-numeric field ({exc})") from None
        if not all(math.isfinite(v) for v in (r, ax, ay, az)):
            raise BathTableError(f"line {lineno}: non-finite value")
        spins.append(NuclearSpin((ax, ay, az), polarization, label))
        distances.append(r)
    if not spins:
        raise BathTableError("bath table has a header but no rows")
    return SpinBathSpec(tuple(spins), zeeman, tuple(distances), polarization_convention)


def load_bath_file(path: str | Path, **kwargs) -> SpinBathSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise BathTableError(f"{path}: {exc.strerror}") from None
    try:
        return load_bath_table(text, **kwargs)
    except BathTableError as exc:
        raise BathTableError(f"{path}: {exc}") from None


def bundled_table_text() -> str:
    return resources.files("deutsch_noise").joinpath("data/nv_bath_32.csv").read_text(encoding="utf-8")


def nv_bath(
    magnetic_field_T: float = 0.1,
    polarization: float = 0.1,
    angular_zeeman: bool = True,
    polarization_convention: str = "spin",
) -> SpinBathSpec:
    """The bundled 32-spin bath at the given field and uniform polarization."""
    return load_bath_table(
        bundled_table_text(),
        polarization=polarization,
        zeeman=zeeman_frequency(magnetic_field_T, angular=angular_zeeman),
        polarization_convention=polarization_convention,
    )
