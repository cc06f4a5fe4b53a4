"""Cross-certification of the closed forms against independent oracles.

Each check compares a phase-space formula with either the truncated Fock
simulator, numeric differentiation of the characteristic function, or
central finite differences of the loss, and records the worst deviation
next to the tolerance it must meet.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass

import numpy as np

from . import ansatz, fock_oracle, observables as ob, phase_space as ps, sampling, solver
from .ansatz import QsvaParams


@dataclass(frozen=True)
class CheckResult:
    name: str
    cases: int
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_error) and self.max_error <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}  {self.name:<32} cases={self.cases:<4} "
                f"max_err={self.max_error:.3e}  tol={self.tolerance:.0e}")


def random_circuit(n: int, rng: np.random.Generator, alpha_max: float = 1.0,
                   r_max: float = 0.75) -> QsvaParams:
    """Random circuit parameters with ``|alpha| <= alpha_max`` and ``r <= r_max``."""
    mag = rng.uniform(0, alpha_max, n)
    deltas = mag * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    r = rng.uniform(0, r_max, n)
    theta = rng.uniform(0, 2 * np.pi, n)
    h = rng.uniform(-1, 1, n * n)
    return QsvaParams(deltas, r, theta, h)


def random_state(n: int, rng: np.random.Generator, **kw) -> ps.GaussianState:
    return ansatz.prepare_state(random_circuit(n, rng, **kw))


def _patterns(n: int, max_total: int):
    for counts in itertools.product(range(max_total + 1), repeat=n):
        if sum(counts) <= max_total:
            yield counts


def check_symplectic(n_cases: int, rng) -> CheckResult:
    worst = 0.0
    for _ in range(n_cases):
        n = int(rng.integers(1, 5))
        gs = ansatz.circuit(random_circuit(n, rng, r_max=1.5))
        t = ps.compose_all([gs[i] for i in rng.permutation(len(gs))])
        worst = max(worst, ps.symplectic_error(t.M), *(ps.symplectic_error(g.M) for g in gs))
    return CheckResult("symplectic composition", n_cases, worst, ps.SYMPLECTIC_TOL)


def check_moments(n_cases: int, rng) -> list[CheckResult]:
    """Closed-form moments against numerically differentiated ``chi``."""
    err_n = err_q = err_4 = 0.0
    for _ in range(n_cases):
        n = int(rng.integers(1, 4))
        state = random_state(n, rng)
        d_est, g_est = ps.numeric_moments(state)
        est = ps._from_trusted(n, g_est, d_est)
        for j in range(n):
            err_n = max(err_n, abs(ob.mean_photon(est, j) - ob.mean_photon(state, j)))
            err_4 = max(err_4, abs(ob.quartic_expectation(est, j)
                                   - ob.quartic_expectation(state, j)))
            for k in range(n):
                err_q = max(err_q, abs(ob.quadratic_expectation(est, j, k)
                                       - ob.quadratic_expectation(state, j, k)))
    return [CheckResult("mean photon vs chi derivatives", n_cases, err_n, 1e-6),
            CheckResult("quadratic vs chi derivatives", n_cases, err_q, 1e-6),
            CheckResult("quartic vs chi derivatives", n_cases, err_4, 1e-4)]


def check_fock(n_cases: int, rng, modes=(2, 3), cutoff: int = 56) -> list[CheckResult]:
    """Energy, moments and pattern probabilities against the Fock simulator."""
    err_h = err_m = err_p = 0.0
    for i in range(n_cases):
        n = modes[i % len(modes)]
        params = random_circuit(n, rng)
        state = ansatz.prepare_state(params)
        v = fock_oracle.oracle_prepare(params, cutoff)
        h = ob.LatticeHamiltonian.chain(n, rng.uniform(-1, 1))
        err_h = max(err_h, abs(ob.hamiltonian_expectation(state, h)
                               - fock_oracle.oracle_expectation(v, h)))
        for j in range(n):
            err_m = max(err_m, abs(ob.quartic_expectation(state, j)
                                   - fock_oracle.oracle_quartic(v, j)))
            for k in range(n):
                err_m = max(err_m, abs(ob.quadratic_expectation(state, j, k)
                                       - fock_oracle.oracle_quadratic(v, j, k)))
        for counts in _patterns(n, 4 if n == 2 else 3):
            err_p = max(err_p, abs(sampling.pattern_probability(state, counts)
                                   - fock_oracle.oracle_pattern_probability(v, counts)))
    return [CheckResult("hamiltonian vs Fock", n_cases, err_h, 1e-6),
            CheckResult("moments vs Fock", n_cases, err_m, 1e-6),
            CheckResult("pattern probability vs Fock", n_cases, err_p, 1e-6)]


def check_gradient(n_cases: int, rng) -> CheckResult:
    """Analytic loss gradient against central differences, componentwise."""
    worst = 0.0
    for i in range(n_cases):
        n = int(rng.integers(2, 5))
        h = ob.LatticeHamiltonian.chain(n, -1.0)
        if i % 2:
            spec = solver.LossSpec("bound", n_target=3.0, site_a=0, site_b=n - 1)
        else:
            spec = solver.LossSpec("single", n_target=3.0)
        vec = random_circuit(n, rng, r_max=0.5).to_vector()
        _, grad, _ = solver.analytic_gradient(vec, n, spec, h)
        fd = solver.fd_gradient(vec, n, spec, h, 1e-5)
        # relative error with an absolute floor of 1e-8: |diff| <= 1e-5 * max(|fd|, 1e-3)
        rel = np.abs(grad - fd) / np.maximum(np.abs(fd), 1e-3)
        worst = max(worst, float(rel.max()))
    return CheckResult("analytic vs FD gradient", n_cases, worst, 1e-5)


def run_suite(quick: bool = False, seed: int = 0) -> list[CheckResult]:
    """Run every check; ``quick`` shrinks case counts and uses 2-mode circuits."""
    rng = np.random.default_rng(seed)
    results = [check_symplectic(100 if quick else 1000, rng)]
    results += check_moments(10 if quick else 50, rng)
    if quick:
        results += check_fock(5, rng, modes=(2,))
    else:
        results += check_fock(25, rng)
    results.append(check_gradient(4 if quick else 20, rng))
    return results


def report_json(results: list[CheckResult]) -> str:
    rows = [dict(asdict(r), passed=r.passed) for r in results]
    return json.dumps({"passed": all(r.passed for r in results), "checks": rows}, indent=2)
