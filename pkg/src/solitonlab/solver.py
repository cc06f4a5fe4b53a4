"""Adam training of the soliton ansatz against energy and photon-number costs."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import ansatz
from . import observables as ob
from .ansatz import QsvaParams
from .entanglement import Bipartition, log_negativity
from .phase_space import GaussianState

THREADS_ENV = "SOLITONLAB_THREADS"


class TrainingDiverged(RuntimeError):
    """Non-finite loss or gradient; carries the last finite parameters."""

    def __init__(self, message, params=None, index=None, epoch=None):
        super().__init__(message)
        self.params = params
        self.index = index
        self.epoch = epoch


@dataclass(frozen=True)
class LossSpec:
    """Cost function settings.

    ``single``: ``exp(<H>/n) + w_N (<N> - N_T)^2``.
    ``bound`` adds ``weight_peak exp(-<n_A>) + weight_balance exp(<n_A> - <n_B>)``.
    """

    variant: str = "single"
    n_target: float = 10.0
    weight_number: float = 1.0
    site_a: int | None = None
    site_b: int | None = None
    weight_peak: float = 1.0
    weight_balance: float = 1.0

    def __post_init__(self):
        if self.variant not in ("single", "bound"):
            raise ValueError(f"variant must be 'single' or 'bound', got {self.variant!r}")
        for name in ("weight_number", "weight_peak", "weight_balance"):
            w = getattr(self, name)
            if not (np.isfinite(w) and w >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {w}")
        if self.variant == "bound":
            if self.site_a is None or self.site_b is None or not 0 <= self.site_a < self.site_b:
                raise ValueError(f"bound variant needs 0 <= site_a < site_b, got "
                                 f"{self.site_a}, {self.site_b}")

    def validate(self, n_sites: int) -> None:
        if self.variant == "bound" and self.site_b >= n_sites:
            raise ValueError(f"site_b={self.site_b} out of range for {n_sites} sites")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30000
    learning_rate: float = 0.01
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    grad_mode: str = "analytic"
    fd_step: float = 1e-5
    history_stride: int = 100

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        for b in (self.adam_beta1, self.adam_beta2):
            if not 0 <= b < 1:
                raise ValueError(f"Adam betas must lie in [0, 1), got {b}")
        if self.grad_mode not in ("analytic", "finite_difference"):
            raise ValueError(f"unknown grad_mode {self.grad_mode!r}")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")
        if self.history_stride < 1:
            raise ValueError("history_stride must be >= 1")


HISTORY_COLUMNS = ("epoch", "loss", "mean_H", "mean_N", "log_negativity")


@dataclass
class TrainHistory:
    rows: list = field(default_factory=list)

    def append(self, epoch, loss, mean_h, mean_n, e_n):
        self.rows.append((int(epoch), float(loss), float(mean_h), float(mean_n), float(e_n)))

    def column(self, name: str) -> np.ndarray:
        return np.array([r[HISTORY_COLUMNS.index(name)] for r in self.rows])

    def __len__(self):
        return len(self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(HISTORY_COLUMNS)
        for r in self.rows:
            w.writerow([r[0]] + [repr(x) for x in r[1:]])
        return buf.getvalue()


def initial_params(n: int, seed: int, scale: float = 0.1) -> QsvaParams:
    """Seeded uniform(-scale, scale) initialization of every real parameter."""
    return QsvaParams.random(n, np.random.default_rng(seed), scale)


def loss(state: GaussianState, spec: LossSpec, h: ob.LatticeHamiltonian) -> float:
    if state.n_modes != h.n_sites:
        raise ob.InvalidDimension(f"state has {state.n_modes} modes, Hamiltonian {h.n_sites}")
    n = h.n_sites
    value = np.exp(ob.hamiltonian_expectation(state, h) / n)
    value += spec.weight_number * (ob.total_photon(state) - spec.n_target) ** 2
    if spec.variant == "bound":
        na = ob.mean_photon(state, spec.site_a)
        nb = ob.mean_photon(state, spec.site_b)
        value += spec.weight_peak * np.exp(-na) + spec.weight_balance * np.exp(na - nb)
    return float(value)


def loss_and_state_grad(state: GaussianState, spec: LossSpec, h: ob.LatticeHamiltonian):
    """Loss together with its gradient on ``(g, d)``."""
    n = h.n_sites
    energy = ob.hamiltonian_expectation(state, h)
    number = ob.total_photon(state)
    e = np.exp(energy / n)
    value = e + spec.weight_number * (number - spec.n_target) ** 2
    Gh, Dh = ob.hamiltonian_grad(state, h)
    Gn, Dn = ob.total_photon_grad(state)
    cn = 2 * spec.weight_number * (number - spec.n_target)
    G = e / n * Gh + cn * Gn
    D = e / n * Dh + cn * Dn
    if spec.variant == "bound":
        na = ob.mean_photon(state, spec.site_a)
        nb = ob.mean_photon(state, spec.site_b)
        peak = spec.weight_peak * np.exp(-na)
        bal = spec.weight_balance * np.exp(na - nb)
        value += peak + bal
        Ga, Da = ob.photon_number_grad(state, spec.site_a)
        Gb, Db = ob.photon_number_grad(state, spec.site_b)
        G = G + (bal - peak) * Ga - bal * Gb
        D = D + (bal - peak) * Da - bal * Db
    return float(value), G, D


def _vector_loss(vec, n, spec, h) -> float:
    return loss(ansatz.forward(vec, n).state, spec, h)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def fd_gradient(vec, n, spec, h, step: float = 1e-5) -> np.ndarray:
    """Central differences of the loss, one parameter at a time."""
    vec = np.asarray(vec, dtype=float)

    def component(i):
        e = np.zeros_like(vec)
        e[i] = step
        return (_vector_loss(vec + e, n, spec, h) - _vector_loss(vec - e, n, spec, h)) / (2 * step)

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            comps = list(pool.map(component, range(vec.size)))
    else:
        comps = [component(i) for i in range(vec.size)]
    grad = np.array(comps)
    bad = np.flatnonzero(~np.isfinite(grad))
    if bad.size:
        raise TrainingDiverged(f"non-finite gradient at parameter {bad[0]}", index=int(bad[0]))
    return grad


def analytic_gradient(vec, n, spec, h):
    """Loss and exact gradient by reverse-mode chain rule through the circuit."""
    fw = ansatz.forward(vec, n)
    value, G, D = loss_and_state_grad(fw.state, spec, h)
    return value, ansatz.backward(vec, n, fw, G, D), fw.state


def gradient(params: QsvaParams, spec: LossSpec, h: ob.LatticeHamiltonian,
             config: TrainConfig | None = None) -> np.ndarray:
    """Gradient of ``loss(prepare_state(params))`` in the flat parameter layout."""
    config = config or TrainConfig()
    n = params.n_modes
    spec.validate(n)
    vec = params.to_vector()
    if config.grad_mode == "finite_difference":
        return fd_gradient(vec, n, spec, h, config.fd_step)
    with np.errstate(all="ignore"):
        value, grad, _ = analytic_gradient(vec, n, spec, h)
    _check_finite(value, grad)
    return grad


def _check_finite(value, grad, params=None, epoch=None) -> None:
    """Raise :class:`TrainingDiverged` naming the first non-finite gradient entry."""
    bad = np.flatnonzero(~np.isfinite(grad))
    index = int(bad[0]) if bad.size else None
    where = f" at epoch {epoch}" if epoch is not None else ""
    if not np.isfinite(value):
        raise TrainingDiverged(f"non-finite loss{where}"
                               + (f" (parameter {index})" if index is not None else ""),
                               params=params, index=index, epoch=epoch)
    if index is not None:
        raise TrainingDiverged(f"non-finite gradient at parameter {index}{where}",
                               params=params, index=index, epoch=epoch)


def _alice_for(spec: LossSpec, n: int) -> Bipartition | None:
    if spec.variant == "bound":
        return Bipartition([spec.site_a])
    if n >= 3:
        return Bipartition.soliton_site(n)
    return Bipartition([0]) if n >= 2 else None


def train(init: QsvaParams, spec: LossSpec, h: ob.LatticeHamiltonian,
          config: TrainConfig | None = None, callback=None):
    """Minimize the loss with Adam from ``init``.

    Returns the final parameters and a :class:`TrainHistory` holding a row
    every ``history_stride`` epochs plus the last one. ``callback(epoch,
    params, row)`` is invoked whenever a row is recorded. A non-finite loss
    raises :class:`TrainingDiverged` carrying the last finite parameters.
    """
    config = config or TrainConfig()
    n = init.n_modes
    if n != h.n_sites:
        raise ob.InvalidDimension(f"params have {n} modes, Hamiltonian {h.n_sites} sites")
    spec.validate(n)
    part = _alice_for(spec, n)
    vec = init.to_vector()
    m = np.zeros_like(vec)
    v = np.zeros_like(vec)
    b1, b2 = config.adam_beta1, config.adam_beta2
    history = TrainHistory()
    last_good = init

    def record(epoch, value, state):
        e_n = log_negativity(state, part) if part is not None else 0.0
        history.append(epoch, value, ob.hamiltonian_expectation(state, h),
                       ob.total_photon(state), e_n)
        if callback is not None:
            callback(epoch, QsvaParams.from_vector(vec, n), history.rows[-1])

    for epoch in range(config.epochs + 1):
        with np.errstate(all="ignore"):
            if config.grad_mode == "analytic":
                value, grad, state = analytic_gradient(vec, n, spec, h)
            else:
                state = ansatz.forward(vec, n).state
                value = loss(state, spec, h)
                grad = None
        if not np.isfinite(value):
            _check_finite(value, grad if grad is not None else np.zeros(0),
                          last_good, epoch)
        if epoch % config.history_stride == 0 or epoch == config.epochs:
            record(epoch, value, state)
        if epoch == config.epochs:
            break
        if grad is None:
            try:
                with np.errstate(all="ignore"):
                    grad = fd_gradient(vec, n, spec, h, config.fd_step)
            except TrainingDiverged as exc:
                raise TrainingDiverged(str(exc), last_good, exc.index, epoch) from None
        _check_finite(value, grad, last_good, epoch)
        last_good = QsvaParams.from_vector(vec, n)
        t = epoch + 1
        m = b1 * m + (1 - b1) * grad
        v = b2 * v + (1 - b2) * grad**2
        m_hat = m / (1 - b1**t)
        v_hat = v / (1 - b2**t)
        vec = vec - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_eps)
    return QsvaParams.from_vector(vec, n), history
