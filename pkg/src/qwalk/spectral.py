"""Dense symmetric eigendecomposition, eigenspace grouping, and
integer-spectrum validation.

All downstream formulas consume eigenspace projection masses (sums over a
degenerate group), never individual eigenvectors, so results do not depend
on the solver's arbitrary basis choice inside a degenerate eigenspace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SpectrumError

#: Eigenvalues closer than this are treated as one eigenspace.
GROUP_TOL = 1e-6
#: Maximum distance from the nearest integer for a spectrum to validate.
INTEGER_TOL = 1e-6
ORTHONORMALITY_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8
UNIFORM_EIGENVECTOR_TOL = 1e-8


@dataclass(frozen=True)
class EigenGroup:
    """One distinct eigenvalue with the indices of its eigenspace."""

    value: float
    indices: tuple[int, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class Spectrum:
    """Orthonormal real eigendecomposition of a symmetric matrix.

    ``eigenvalues`` are ascending; column i of ``eigenvectors`` pairs with
    eigenvalue i.  Arrays are frozen read-only.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    groups: tuple[EigenGroup, ...]

    @property
    def n(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True)
class IntegerSpectrum:
    """A Spectrum validated to be integral with a simple zero eigenvalue."""

    base: Spectrum
    int_eigenvalues: tuple[int, ...]
    zero_index: int

    @property
    def n(self) -> int:
        return self.base.n


def eigendecompose(matrix: np.ndarray, *, group_tol: float = GROUP_TOL) -> Spectrum:
    """Eigendecompose a real symmetric matrix and group its eigenspaces.

    Raises SpectrumError if the input is not symmetric, the solver fails to
    converge, or the decomposition misses the orthonormality/reconstruction
    contract.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SpectrumError(f"expected a square matrix, got shape {m.shape}")
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if float(np.max(np.abs(m - m.T))) > 1e-12 * (1.0 + scale):
        raise SpectrumError("matrix is not symmetric")
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise SpectrumError(f"symmetric eigensolver failed to converge: {exc}") from exc

    n = len(eigenvalues)
    ortho = float(np.max(np.abs(eigenvectors.T @ eigenvectors - np.eye(n))))
    if ortho > ORTHONORMALITY_TOL:
        raise SpectrumError(f"eigenvectors not orthonormal: defect {ortho:.3e}")
    residual = float(
        np.max(np.abs(m - (eigenvectors * eigenvalues) @ eigenvectors.T))
    )
    if residual > RECONSTRUCTION_TOL * (1.0 + scale):
        raise SpectrumError(f"reconstruction residual too large: {residual:.3e}")

    groups = _group_eigenvalues(eigenvalues, group_tol)
    eigenvalues.flags.writeable = False
    eigenvectors.flags.writeable = False
    return Spectrum(eigenvalues, eigenvectors, groups)


def _group_eigenvalues(eigenvalues: np.ndarray, tol: float) -> tuple[EigenGroup, ...]:
    # Cluster ascending eigenvalues at gaps >= tol; the spread inside one
    # cluster must stay below tol or the grouping is ambiguous.
    groups: list[EigenGroup] = []
    start = 0
    n = len(eigenvalues)
    for i in range(1, n + 1):
        if i == n or eigenvalues[i] - eigenvalues[i - 1] >= tol:
            block = eigenvalues[start:i]
            if float(block[-1] - block[0]) >= tol:
                raise SpectrumError(
                    "ambiguous eigenvalue clustering near "
                    f"{float(block[0]):.9g}..{float(block[-1]):.9g}"
                )
            groups.append(EigenGroup(float(np.mean(block)), tuple(range(start, i))))
            start = i
    return tuple(groups)


def validate_integer_spectrum(
    spectrum: Spectrum, *, int_tol: float = INTEGER_TOL
) -> IntegerSpectrum:
    """Gate a spectrum as integral with a simple zero eigenvalue.

    Intended for Laplacians of connected graphs: exactly one eigenvalue
    must round to 0 and its eigenvector must be the uniform vector up to
    overall sign.
    """
    ints = []
    for i, value in enumerate(spectrum.eigenvalues):
        rounded = round(float(value))
        if abs(value - rounded) > int_tol:
            raise SpectrumError(
                f"non-integer eigenvalue {float(value):.9g} at index {i}"
            )
        ints.append(int(rounded))
    zeros = [i for i, v in enumerate(ints) if v == 0]
    if len(zeros) != 1:
        raise SpectrumError(
            f"zero eigenvalue is not simple: multiplicity {len(zeros)}"
        )
    zero_index = zeros[0]
    n = spectrum.n
    vec = spectrum.eigenvectors[:, zero_index]
    sign = 1.0 if vec[int(np.argmax(np.abs(vec)))] >= 0 else -1.0
    if float(np.max(np.abs(vec - sign / np.sqrt(n)))) > UNIFORM_EIGENVECTOR_TOL:
        raise SpectrumError("zero-eigenvalue eigenvector is not uniform")
    return IntegerSpectrum(spectrum, tuple(ints), zero_index)


def eigenspace_amplitudes(spectrum: Spectrum, vertex: int) -> np.ndarray:
    """Real amplitudes of the basis state of ``vertex`` in the eigenbasis.

    Component i is the inner product of eigenvector i with the vertex
    state; the squared amplitudes sum to 1.
    """
    if not 0 <= vertex < spectrum.n:
        raise SpectrumError(f"vertex index {vertex} out of range for n={spectrum.n}")
    amps = spectrum.eigenvectors[vertex, :].copy()
    total = float(np.sum(amps**2))
    if abs(total - 1.0) > 1e-10:
        raise SpectrumError(f"amplitude norm defect: {abs(total - 1.0):.3e}")
    amps.flags.writeable = False
    return amps


def group_masses(spectrum: Spectrum, vertex: int) -> dict[float, float]:
    """Squared projection mass of a vertex state on each eigenspace."""
    amps = eigenspace_amplitudes(spectrum, vertex)
    return {
        g.value: float(np.sum(amps[list(g.indices)] ** 2)) for g in spectrum.groups
    }


def spectrum_to_json_dict(ints: IntegerSpectrum) -> dict:
    return {
        "eigenvalues": list(ints.int_eigenvalues),
        "groups": [
            {"value": int(round(g.value)), "multiplicity": g.multiplicity}
            for g in ints.base.groups
        ],
        "zero_index": ints.zero_index,
    }


def eigenvectors_to_csv(spectrum: Spectrum) -> str:
    """CSV dump of the eigenbasis: one column per eigenvector."""
    header = "vertex," + ",".join(f"eig_{i}" for i in range(spectrum.n))
    lines = [header]
    for v in range(spectrum.n):
        row = ",".join(f"{spectrum.eigenvectors[v, i]:.12g}" for i in range(spectrum.n))
        lines.append(f"{v},{row}")
    return "\n".join(lines) + "\n"
