"""Fock-state evolution through mode unitaries, plus heralded conditioning.

Two independent engines are provided on purpose:

* `evolve_full` contracts the composed mode unitary with the state via
  matrix permanents (Ryser above 4x4, naive permutation sum below);
* `evolve_elementwise` applies each circuit element directly to the
  occupation amplitudes by binomially expanding the rewritten creation
  operators.

They are each other's oracle: the paper-level claims here are exact
interference cancellations, so bugs must not be self-confirming.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .circuit import (BeamSplitter, Circuit, Mirror, PhaseShifter, compose,
                      resolve_phase)
from .fock import FockBasis, StateVector, enumerate_basis

PHOTON_LIMIT = 6  # default cap for permanent-based evolution


class ZeroProbabilityError(ValueError):
    """Conditioning on a herald pattern with probability zero."""


def permanent_naive(A) -> complex:
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise ValueError("permanent needs a square matrix")
    if n == 0:
        return 1 + 0j
    if n > 8:
        raise ValueError("naive permanent limited to n <= 8")
    total = 0j
    for perm in itertools.permutations(range(n)):
        p = 1 + 0j
        for i, j in enumerate(perm):
            p *= A[i, j]
        total += p
    return total


def permanent_ryser(A) -> complex:
    """Ryser inclusion-exclusion permanent with Gray-code subset updates."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise ValueError("permanent needs a square matrix")
    if n == 0:
        return 1 + 0j
    if n > 12:
        raise ValueError("Ryser permanent limited to n <= 12")
    row_sums = np.zeros(n, dtype=complex)
    gray = 0
    total = 0j
    for k in range(1, 1 << n):
        new_gray = k ^ (k >> 1)
        changed = new_gray ^ gray
        j = changed.bit_length() - 1
        if new_gray & changed:
            row_sums += A[:, j]
        else:
            row_sums -= A[:, j]
        gray = new_gray
        sign = -1 if new_gray.bit_count() & 1 else 1
        total += sign * np.prod(row_sums)
    return ((-1) ** n) * total


def permanent(A) -> complex:
    A = np.asarray(A, dtype=complex)
    return permanent_ryser(A) if A.shape[0] > 4 else permanent_naive(A)


def _expand_indices(occ):
    out = []
    for mode, n in enumerate(occ):
        out.extend([mode] * n)
    return out


def transition_amplitude(U, input_occ, output_occ) -> complex:
    """<output| U_hat |input> = per(U_sub) / sqrt(prod in_m! prod out_k!)."""
    input_occ = tuple(input_occ)
    output_occ = tuple(output_occ)
    n_in, n_out = sum(input_occ), sum(output_occ)
    if n_in != n_out:
        raise ValueError(f"photon-number mismatch: {n_in} vs {n_out}")
    if n_in > PHOTON_LIMIT:
        raise ValueError(f"photon number {n_in} exceeds limit {PHOTON_LIMIT}")
    if n_in == 0:
        return 1 + 0j
    U = np.asarray(U, dtype=complex)
    cols = _expand_indices(input_occ)
    rows = _expand_indices(output_occ)
    sub = U[np.ix_(rows, cols)]
    norm = 1.0
    for n in input_occ:
        norm *= math.factorial(n)
    for n in output_occ:
        norm *= math.factorial(n)
    return permanent(sub) / math.sqrt(norm)


def evolve_full(U, psi: StateVector) -> StateVector:
    """Permanent-based evolution of a Fock state through a mode unitary."""
    U = np.asarray(U, dtype=complex)
    basis = psi.basis
    if U.shape != (basis.modes, basis.modes):
        raise ValueError(f"unitary dimension {U.shape} does not match "
                         f"{basis.modes} modes")
    out = np.zeros(len(basis), dtype=complex)
    for idx_in, amp in enumerate(psi.amplitudes):
        if amp == 0:
            continue
        v_in = basis.vectors[idx_in]
        for idx_out, v_out in enumerate(basis.vectors):
            out[idx_out] += amp * transition_amplitude(U, v_in, v_out)
    return StateVector(basis, out)


def _apply_phase_diag(basis, amps, mode, factor_per_photon):
    phases = np.array([factor_per_photon ** v[mode] for v in basis.vectors])
    return amps * phases


def _apply_beam_splitter(basis, amps, i, j):
    # rewrite a_i^dag -> (a_i^dag + i a_j^dag)/sqrt2, a_j^dag -> (i a_i^dag + a_j^dag)/sqrt2
    # and expand the p-th and q-th powers binomially
    alpha = delta = 1.0 / math.sqrt(2.0)
    beta = gamma = 1j / math.sqrt(2.0)
    out = np.zeros_like(amps)
    fact = [math.factorial(n) for n in range(basis.photons + 1)]
    for idx, v in enumerate(basis.vectors):
        c = amps[idx]
        if c == 0:
            continue
        p, q = v[i], v[j]
        base = c / math.sqrt(fact[p] * fact[q])
        for k in range(p + 1):
            ck = math.comb(p, k) * alpha ** k * beta ** (p - k)
            for l in range(q + 1):
                cl = math.comb(q, l) * gamma ** l * delta ** (q - l)
                ni, nj = k + l, p + q - k - l
                w = list(v)
                w[i], w[j] = ni, nj
                out[basis.rank(tuple(w))] += base * ck * cl * math.sqrt(fact[ni] * fact[nj])
    return out


def evolve_elementwise(circuit: Circuit, bindings, psi: StateVector) -> StateVector:
    """Element-by-element evolution, independent of the permanent engine."""
    basis = psi.basis
    if basis.modes != circuit.modes:
        raise ValueError("state mode count does not match circuit")
    amps = psi.amplitudes.copy()
    for el in circuit.elements:
        if isinstance(el, PhaseShifter):
            phi = resolve_phase(el.phase, bindings)
            amps = _apply_phase_diag(basis, amps, el.mode, np.exp(1j * phi))
        elif isinstance(el, Mirror):
            amps = _apply_phase_diag(basis, amps, el.mode, 1j)
        elif isinstance(el, BeamSplitter):
            amps = _apply_beam_splitter(basis, amps, el.i, el.j)
        else:
            raise TypeError(f"unknown element {el!r}")
    return StateVector(basis, amps)


def run_circuit(circuit: Circuit, bindings=None, engine="elementwise") -> StateVector:
    """Evolve the circuit's source state through all elements."""
    from .fock import state_from_sources
    psi = state_from_sources(circuit.modes, circuit.sources)
    if engine == "elementwise":
        return evolve_elementwise(circuit, bindings, psi)
    if engine == "full":
        return evolve_full(compose(circuit, bindings), psi)
    raise ValueError(f"unknown engine '{engine}'")


@dataclass(frozen=True)
class DetectionPattern:
    """Per-mode constraint: an exact photon count or None for 'any'."""

    constraints: tuple  # length = modes; entries int or None

    @classmethod
    def exactly(cls, modes: int, counts: dict) -> "DetectionPattern":
        cons = [None] * modes
        for mode, n in counts.items():
            if not 0 <= mode < modes:
                raise ValueError(f"pattern mode {mode} out of range")
            cons[mode] = int(n)
        return cls(tuple(cons))

    def matches(self, occ) -> bool:
        return all(c is None or c == n for c, n in zip(self.constraints, occ))

    def merged(self, other: "DetectionPattern") -> "DetectionPattern":
        cons = []
        for a, b in zip(self.constraints, other.constraints):
            if a is not None and b is not None and a != b:
                # contradictory constraints match nothing; keep an impossible count
                cons.append(-1)
            else:
                cons.append(a if a is not None else b)
        return DetectionPattern(tuple(cons))


def pattern_probability(psi: StateVector, pattern: DetectionPattern) -> float:
    if len(pattern.constraints) != psi.basis.modes:
        raise ValueError("pattern mode count does not match state")
    total = 0.0
    for idx, v in enumerate(psi.basis.vectors):
        if pattern.matches(v):
            total += abs(psi.amplitudes[idx]) ** 2
    return total


@dataclass(frozen=True)
class ConditionalResult:
    probability: float
    reduced_state: StateVector
    kept_modes: tuple  # original indices of the unconstrained modes


def condition(psi: StateVector, heralds) -> ConditionalResult:
    """Project onto exact herald counts and renormalize over the free modes."""
    basis = psi.basis
    heralds = tuple((int(m), int(n)) for m, n in heralds)
    hmodes = [m for m, _ in heralds]
    if len(set(hmodes)) != len(hmodes):
        raise ValueError("herald modes must be distinct")
    hmap = dict(heralds)
    kept = tuple(m for m in range(basis.modes) if m not in hmap)
    if not kept:
        raise ValueError("conditioning must leave at least one free mode")
    n_left = basis.photons - sum(hmap.values())
    if n_left < 0:
        raise ZeroProbabilityError("herald counts exceed total photon number")
    red_basis = enumerate_basis(len(kept), n_left)
    red = np.zeros(len(red_basis), dtype=complex)
    prob = 0.0
    for idx, v in enumerate(basis.vectors):
        if all(v[m] == n for m, n in heralds):
            amp = psi.amplitudes[idx]
            prob += abs(amp) ** 2
            red[red_basis.rank(tuple(v[m] for m in kept))] = amp
    if prob <= 1e-300:
        raise ZeroProbabilityError("herald pattern has zero probability")
    return ConditionalResult(prob, StateVector(red_basis, red / math.sqrt(prob)), kept)
