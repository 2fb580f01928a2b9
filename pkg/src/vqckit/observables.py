"""Pauli-sum observables and multi-observable expectation evaluation.

An observable is a real-weighted sum of Pauli strings; character k of a
string acts on qubit k (little-endian, matching the statevector layout).
Evaluating M observables on one state costs M post-processing passes and
zero additional state evolutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .statevector import num_qubits_of, pauli_masks

_HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class Observable:
    terms: tuple[tuple[float, str], ...]

    def __post_init__(self):
        terms = tuple((float(c), str(p)) for c, p in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise ValueError("observable needs at least one term")
        length = len(terms[0][1])
        for coeff, string in terms:
            if len(string) != length:
                raise ValueError(
                    f"inconsistent Pauli string lengths: {string!r} vs "
                    f"length {length}")
            pauli_masks(string)  # validates letters

    @property
    def num_qubits(self) -> int:
        return len(self.terms[0][1])

    def compiled(self) -> "CompiledObservable":
        cached = getattr(self, "_compiled", None)
        if cached is None:
            cached = CompiledObservable.from_observable(self)
            object.__setattr__(self, "_compiled", cached)
        return cached


@dataclass(frozen=True)
class CompiledObservable:
    coeffs: np.ndarray
    x_masks: np.ndarray
    sign_masks: np.ndarray
    phases: np.ndarray

    @staticmethod
    def from_observable(obs: Observable) -> "CompiledObservable":
        n_terms = len(obs.terms)
        coeffs = np.empty(n_terms, dtype=np.float64)
        x_masks = np.empty(n_terms, dtype=np.int64)
        sign_masks = np.empty(n_terms, dtype=np.int64)
        phases = np.empty(n_terms, dtype=np.complex128)
        for t, (coeff, string) in enumerate(obs.terms):
            coeffs[t] = coeff
            x_masks[t], sign_masks[t], phases[t] = pauli_masks(string)
        return CompiledObservable(coeffs, x_masks, sign_masks, phases)


def parse_observable(text: str) -> Observable:
    """Parse "+"-separated terms of the form ``coeff*STRING`` or ``STRING``."""
    terms = []
    for raw in text.split("+"):
        term = raw.strip()
        if not term:
            raise ValueError(f"empty term in observable {text!r}")
        if "*" in term:
            coeff_text, _, string = term.partition("*")
            try:
                coeff = float(coeff_text.strip())
            except ValueError as exc:
                raise ValueError(f"bad coefficient in term {term!r}") from exc
            string = string.strip()
        else:
            coeff, string = 1.0, term
        if not string or any(ch not in "IXYZ" for ch in string):
            raise ValueError(f"bad Pauli string in term {term!r}")
        terms.append((coeff, string))
    lengths = {len(s) for _, s in terms}
    if len(lengths) > 1:
        raise ValueError(f"inconsistent string lengths in {text!r}")
    return Observable(tuple(terms))


def observable_to_text(obs: Observable) -> str:
    return " + ".join(f"{coeff}*{string}" for coeff, string in obs.terms)


def _check_dims(obs: Observable, state: np.ndarray) -> None:
    if obs.num_qubits != num_qubits_of(state):
        raise ValueError(f"observable on {obs.num_qubits} qubits does not "
                         f"match {num_qubits_of(state)}-qubit state")


def apply_observable(obs: Observable, state: np.ndarray) -> np.ndarray:
    """Return O|state> (unnormalized) as a new array."""
    _check_dims(obs, state)
    comp = obs.compiled()
    out = np.empty_like(state)
    _kernels.pauli_sum_apply(out, state, comp.coeffs, comp.x_masks,
                             comp.sign_masks, comp.phases)
    return out


def expectation(obs: Observable, state: np.ndarray) -> float:
    """Re<state|O|state> for a unit-norm state."""
    _check_dims(obs, state)
    comp = obs.compiled()
    value = _kernels.expval_terms(state, comp.coeffs, comp.x_masks,
                                  comp.sign_masks, comp.phases)
    if abs(value.imag) > _HERMITICITY_TOL:
        raise ValueError(f"expectation has non-negligible imaginary part "
                         f"{value.imag:g}; observable or state is broken")
    return float(value.real)


def expectations_all(observables, state: np.ndarray) -> np.ndarray:
    """All M expectations from one already-evolved state."""
    return np.array([expectation(obs, state) for obs in observables])


@dataclass(frozen=True)
class ObservablePack:
    """M observables packed into contiguous term arrays for the kernels."""

    num_obs: int
    num_qubits: int
    term_offs: np.ndarray
    coeffs: np.ndarray
    x_masks: np.ndarray
    sign_masks: np.ndarray
    phases: np.ndarray

    @staticmethod
    def from_observables(observables, num_qubits: int) -> "ObservablePack":
        observables = list(observables)
        for obs in observables:
            if obs.num_qubits != num_qubits:
                raise ValueError(
                    f"observable on {obs.num_qubits} qubits does not match "
                    f"{num_qubits}-qubit circuit")
        parts = [obs.compiled() for obs in observables]
        term_offs = np.zeros(len(parts) + 1, dtype=np.int64)
        for i, comp in enumerate(parts):
            term_offs[i + 1] = term_offs[i] + len(comp.coeffs)
        if parts:
            coeffs = np.concatenate([c.coeffs for c in parts])
            x_masks = np.concatenate([c.x_masks for c in parts])
            sign_masks = np.concatenate([c.sign_masks for c in parts])
            phases = np.concatenate([c.phases for c in parts])
        else:
            coeffs = np.empty(0, dtype=np.float64)
            x_masks = np.empty(0, dtype=np.int64)
            sign_masks = np.empty(0, dtype=np.int64)
            phases = np.empty(0, dtype=np.complex128)
        return ObservablePack(len(parts), num_qubits, term_offs, coeffs,
                              x_masks, sign_masks, phases)
