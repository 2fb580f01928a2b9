"""Gradient backends for multi-observable circuit expectations.

Three routes to d<O_i>/dp for every requested parameter set:

* ``adjoint_gradients``  — exact; one forward evolution, one reverse ket
  sweep and M reverse bra sweeps total, independent of the parameter count.
* ``parameter_shift_gradients`` — exact; 2 evolutions per parameterized gate
  occurrence, each serving all M observables.
* ``spsa_gradients`` — stochastic estimate from 2 evolutions per sample.

``finite_difference_gradients`` is the slow central-difference oracle used to
cross-check the other three.

The adjoint bookkeeping accumulates Im<phi_i|P|psi> at the post-gate state:
with U(a) = exp(-i a P / 2) the derivative is dU/da = -(i/2) P U, and
2*Re(-(i/2) z) = Im(z), which turns the textbook 2*Re<b|dU|k> into the
imaginary part of a plain overlap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .circuit import Circuit, CompiledCircuit, validate_binding
from .instrument import sweep_counters
from .observables import ObservablePack

DEFAULT_SPSA_C = 0.01
DEFAULT_SPSA_SAMPLES = 1
DEFAULT_FD_STEP = 1e-4

_HERMITICITY_TOL = 1e-10


@dataclass
class GradientResult:
    """Expectations (M,) plus per-set gradient arrays of shape (M, set.size)."""

    expectations: np.ndarray
    gradients: dict[str, np.ndarray]


@dataclass(frozen=True)
class WrtLayout:
    """Column layout of the requested parameter sets in the gradient output."""

    wrt_col: np.ndarray            # flat param index -> output column or -1
    slices: tuple[tuple[str, int, int], ...]   # (set name, lo, hi) columns
    flat_of_col: np.ndarray        # output column -> flat param index

    @property
    def n_cols(self) -> int:
        return len(self.flat_of_col)

    @staticmethod
    def build(compiled: CompiledCircuit, wrt) -> "WrtLayout":
        wrt = list(wrt)
        if len(set(wrt)) != len(wrt):
            raise ValueError(f"duplicate set names in wrt: {wrt}")
        wrt_col = np.full(compiled.total_params, -1, dtype=np.int64)
        slices = []
        flat_of_col: list[int] = []
        col = 0
        for name in wrt:
            if name not in compiled.offsets:
                raise ValueError(f"unknown parameter set {name!r} in wrt")
            off, size = compiled.offsets[name]
            slices.append((name, col, col + size))
            for k in range(size):
                wrt_col[off + k] = col
                flat_of_col.append(off + k)
                col += 1
        return WrtLayout(wrt_col, tuple(slices),
                         np.asarray(flat_of_col, dtype=np.int64))

    def split(self, grad: np.ndarray) -> dict[str, np.ndarray]:
        return {name: np.ascontiguousarray(grad[:, lo:hi])
                for name, lo, hi in self.slices}


def pack_expectations(state: np.ndarray, pack: ObservablePack,
                      out: np.ndarray | None = None) -> np.ndarray:
    """Expectations of every packed observable on an evolved state."""
    if out is None:
        out = np.empty(pack.num_obs)
    for i in range(pack.num_obs):
        lo, hi = pack.term_offs[i], pack.term_offs[i + 1]
        value = _kernels.expval_terms(state, pack.coeffs[lo:hi],
                                      pack.x_masks[lo:hi],
                                      pack.sign_masks[lo:hi],
                                      pack.phases[lo:hi])
        if abs(value.imag) > _HERMITICITY_TOL:
            raise ValueError(f"observable {i}: expectation has imaginary "
                             f"part {value.imag:g}")
        out[i] = value.real
    return out


# -- per-input workers (flat parameter vector in, output rows out) ------------

def adjoint_flat(compiled: CompiledCircuit, flat: np.ndarray,
                 pack: ObservablePack, layout: WrtLayout,
                 expect_out: np.ndarray, grad_out: np.ndarray) -> None:
    angles = compiled.angles(flat)
    psi = compiled.run_angles(angles)
    n_obs = pack.num_obs
    phis = np.empty((n_obs, psi.shape[0]), dtype=np.complex128)
    _kernels.seed_bras(psi, phis, pack.term_offs, pack.coeffs, pack.x_masks,
                       pack.sign_masks, pack.phases, expect_out)
    if layout.n_cols > 0 and len(compiled.kinds) > 0:
        sweep_counters.add_reverse(ket=1, bra=n_obs)
        _kernels.adjoint_reverse_pass(
            psi, phis, compiled.kinds, compiled.q0, compiled.q1, angles,
            compiled.gen_axis, compiled.coeff, compiled.f_offs,
            compiled.f_idx, flat, layout.wrt_col, grad_out)


def _occurrence_partials(compiled, g, flat, layout):
    """(column, d angle_g / d param) pairs for gate g's requested factors."""
    out = []
    lo, hi = compiled.f_offs[g], compiled.f_offs[g + 1]
    for t in range(lo, hi):
        col = layout.wrt_col[compiled.f_idx[t]]
        if col < 0:
            continue
        partial = compiled.coeff[g]
        for u in range(lo, hi):
            if u != t:
                partial *= flat[compiled.f_idx[u]]
        out.append((int(col), float(partial)))
    return out


def param_shift_flat(compiled: CompiledCircuit, flat: np.ndarray,
                     pack: ObservablePack, layout: WrtLayout,
                     expect_out: np.ndarray, grad_out: np.ndarray) -> None:
    angles = compiled.angles(flat)
    psi = compiled.run_angles(angles)
    pack_expectations(psi, pack, expect_out)
    if layout.n_cols == 0:
        return
    f_plus = np.empty(pack.num_obs)
    f_minus = np.empty(pack.num_obs)
    for g in range(len(compiled.kinds)):
        if compiled.gen_axis[g] < 0:
            continue
        partials = _occurrence_partials(compiled, g, flat, layout)
        if not partials:
            continue  # nothing trainable touches this occurrence
        base = angles[g]
        angles[g] = base + 0.5 * np.pi
        pack_expectations(compiled.run_angles(angles), pack, f_plus)
        angles[g] = base - 0.5 * np.pi
        pack_expectations(compiled.run_angles(angles), pack, f_minus)
        angles[g] = base
        occ = 0.5 * (f_plus - f_minus)
        for col, partial in partials:
            grad_out[:, col] += occ * partial


def finite_difference_flat(compiled: CompiledCircuit, flat: np.ndarray,
                           pack: ObservablePack, layout: WrtLayout, h: float,
                           expect_out: np.ndarray,
                           grad_out: np.ndarray) -> None:
    pack_expectations(compiled.run(flat), pack, expect_out)
    f_plus = np.empty(pack.num_obs)
    f_minus = np.empty(pack.num_obs)
    for col, p in enumerate(layout.flat_of_col):
        base = flat[p]
        flat[p] = base + h
        pack_expectations(compiled.run(flat), pack, f_plus)
        flat[p] = base - h
        pack_expectations(compiled.run(flat), pack, f_minus)
        flat[p] = base
        grad_out[:, col] = (f_plus - f_minus) / (2.0 * h)


def spsa_flat(compiled: CompiledCircuit, flat: np.ndarray,
              pack: ObservablePack, layout: WrtLayout, c: float,
              samples: int, rng: np.random.Generator,
              expect_out: np.ndarray, grad_out: np.ndarray) -> None:
    pack_expectations(compiled.run(flat), pack, expect_out)
    if layout.n_cols == 0:
        return
    idx = layout.flat_of_col
    f_plus = np.empty(pack.num_obs)
    f_minus = np.empty(pack.num_obs)
    base = flat[idx].copy()
    for _ in range(samples):
        delta = rng.integers(0, 2, size=layout.n_cols).astype(np.float64)
        delta = 2.0 * delta - 1.0
        flat[idx] = base + c * delta
        pack_expectations(compiled.run(flat), pack, f_plus)
        flat[idx] = base - c * delta
        pack_expectations(compiled.run(flat), pack, f_minus)
        flat[idx] = base
        grad_out += np.outer(f_plus - f_minus, 1.0 / (2.0 * c * delta))
    grad_out /= samples


# -- public API ----------------------------------------------------------------

def _prepare(circuit: Circuit, binding, observables, wrt):
    validate_binding(circuit, binding)
    compiled = circuit.compiled()
    pack = ObservablePack.from_observables(observables, circuit.num_qubits)
    layout = WrtLayout.build(compiled, wrt)
    flat = compiled.flat_values(binding)
    return compiled, pack, layout, flat


def _empty_result(layout: WrtLayout) -> GradientResult:
    return GradientResult(np.zeros(0), layout.split(np.zeros((0, layout.n_cols))))


def adjoint_gradients(circuit: Circuit, binding, observables,
                      wrt) -> GradientResult:
    """Exact gradients via the reverse (adjoint) sweep.

    Forward-evolves once, seeds one bra per observable with O_i|psi>, then
    walks the gate list backwards exactly once, moving every gate across with
    its adjoint while accumulating all parameter derivatives. Peak live
    states: M + 2. With no observables, nothing is evolved.
    """
    compiled, pack, layout, flat = _prepare(circuit, binding, observables, wrt)
    if pack.num_obs == 0:
        return _empty_result(layout)
    expect = np.empty(pack.num_obs)
    grad = np.zeros((pack.num_obs, layout.n_cols))
    adjoint_flat(compiled, flat, pack, layout, expect, grad)
    return GradientResult(expect, layout.split(grad))


def parameter_shift_gradients(circuit: Circuit, binding, observables,
                              wrt) -> GradientResult:
    """Exact gradients via the +-pi/2 shift rule, per gate occurrence.

    Each parameterized occurrence is shifted independently; parameter-level
    gradients are chain-ruled through the occurrence's angle expression, which
    handles parameters shared between gates (re-uploading) correctly.
    """
    compiled, pack, layout, flat = _prepare(circuit, binding, observables, wrt)
    if pack.num_obs == 0:
        return _empty_result(layout)
    expect = np.empty(pack.num_obs)
    grad = np.zeros((pack.num_obs, layout.n_cols))
    param_shift_flat(compiled, flat, pack, layout, expect, grad)
    return GradientResult(expect, layout.split(grad))


def spsa_gradients(circuit: Circuit, binding, observables, wrt,
                   c: float = DEFAULT_SPSA_C,
                   samples: int = DEFAULT_SPSA_SAMPLES,
                   seed: int = 0) -> GradientResult:
    """Stochastic gradient estimate along seeded Rademacher directions.

    Each sample costs 2 evolutions regardless of the parameter count and
    serves all M observables. Deterministic given (seed, samples).
    """
    if c <= 0:
        raise ValueError(f"perturbation magnitude c must be > 0, got {c}")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    compiled, pack, layout, flat = _prepare(circuit, binding, observables, wrt)
    if pack.num_obs == 0:
        return _empty_result(layout)
    expect = np.empty(pack.num_obs)
    grad = np.zeros((pack.num_obs, layout.n_cols))
    rng = np.random.default_rng(seed)
    spsa_flat(compiled, flat, pack, layout, c, samples, rng, expect, grad)
    return GradientResult(expect, layout.split(grad))


def finite_difference_gradients(circuit: Circuit, binding, observables, wrt,
                                h: float = DEFAULT_FD_STEP) -> GradientResult:
    """Central differences per trainable entry (test oracle)."""
    if h <= 0:
        raise ValueError(f"step h must be > 0, got {h}")
    compiled, pack, layout, flat = _prepare(circuit, binding, observables, wrt)
    if pack.num_obs == 0:
        return _empty_result(layout)
    expect = np.empty(pack.num_obs)
    grad = np.zeros((pack.num_obs, layout.n_cols))
    finite_difference_flat(compiled, flat, pack, layout, h, expect, grad)
    return GradientResult(expect, layout.split(grad))
