"""Fock-basis enumeration and state vectors for fixed photon number."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FockVector = tuple  # occupation counts per mode, e.g. (2, 0, 0, 1)


def _gen_occupations(modes, photons):
    # descending lexicographic order, mode 0 most significant
    if modes == 1:
        yield (photons,)
        return
    for first in range(photons, -1, -1):
        for rest in _gen_occupations(modes - 1, photons - first):
            yield (first,) + rest


@dataclass(frozen=True)
class FockBasis:
    """All occupation vectors of `photons` photons over `modes` modes.

    Ordering is descending lexicographic with mode 0 most significant,
    so (2,0) < (1,1) < (0,2) by index.
    """

    modes: int
    photons: int
    vectors: tuple = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.modes < 1:
            raise ValueError("modes must be >= 1")
        if self.photons < 0:
            raise ValueError("photons must be >= 0")
        vecs = tuple(_gen_occupations(self.modes, self.photons))
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(vecs)})

    def __len__(self):
        return len(self.vectors)

    def rank(self, v) -> int:
        try:
            return self._index[tuple(v)]
        except KeyError:
            raise ValueError(f"{tuple(v)} is not in basis "
                             f"(modes={self.modes}, photons={self.photons})") from None

    def unrank(self, i: int):
        if not 0 <= i < len(self.vectors):
            raise IndexError(f"basis index {i} out of range 0..{len(self.vectors) - 1}")
        return self.vectors[i]


def enumerate_basis(modes: int, photons: int) -> FockBasis:
    return FockBasis(modes, photons)


def basis_size(modes: int, photons: int) -> int:
    """Stars-and-bars count C(photons + modes - 1, photons)."""
    return math.comb(photons + modes - 1, photons)


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes over a fixed FockBasis."""

    basis: FockBasis
    amplitudes: np.ndarray = field(compare=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (len(self.basis),):
            raise ValueError(f"amplitude array has shape {amps.shape}, "
                             f"expected ({len(self.basis)},)")
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "StateVector":
        n = self.norm()
        if n < 1e-300:
            raise ZeroDivisionError("cannot normalize a zero state")
        return StateVector(self.basis, self.amplitudes / n)

    def amplitude(self, v) -> complex:
        return complex(self.amplitudes[self.basis.rank(v)])


def inner_product(x: StateVector, y: StateVector) -> complex:
    if x.basis != y.basis:
        raise ValueError("states are defined over different bases")
    return complex(np.vdot(x.amplitudes, y.amplitudes))


def state_from_sources(modes: int, sources) -> StateVector:
    """Basis state with the given occupations: sources is [(mode, count), ...]."""
    counts = [0] * modes
    seen = set()
    for mode, n in sources:
        if not 0 <= mode < modes:
            raise ValueError(f"source mode {mode} out of range for {modes} modes")
        if mode in seen:
            raise ValueError(f"duplicate source mode {mode}")
        if n < 0:
            raise ValueError("source photon count must be >= 0")
        seen.add(mode)
        counts[mode] = n
    basis = enumerate_basis(modes, sum(counts))
    amps = np.zeros(len(basis), dtype=complex)
    amps[basis.rank(tuple(counts))] = 1.0
    return StateVector(basis, amps)
