"""Command-line entry points: ``train``, ``analyze``, ``sample`` and ``validate``.

Site indices are zero-based everywhere. Artifacts are written to a
temporary file in the target directory and renamed into place, so a failed
run never leaves a half-written file behind.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import observables as ob
from . import sampling, solver, validate
from .ansatz import QsvaParams, prepare_state
from .entanglement import Bipartition, log_negativity, partial_transpose, symplectic_eigenvalues
from .phase_space import GaussianState

EXIT_CONFIG = 2
EXIT_DIVERGED = 3


class ConfigError(ValueError):
    """A config field is missing, malformed or out of range."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field '{field}': {message}")


@dataclass(frozen=True)
class ExperimentConfig:
    n_sites: int = 17
    gamma: float = -1.0
    n_target: float = 10.0
    loss_variant: str = "single"
    site_a: int | None = None
    site_b: int | None = None
    epochs: int = 30000
    learning_rate: float = 0.01
    seed: int = 0
    grad_mode: str = "analytic"
    fd_step: float = 1e-5
    weight_number: float = 1.0
    weight_peak: float = 1.0
    weight_balance: float = 1.0
    history_stride: int = 100
    output_dir: str = "out"

    def loss_spec(self) -> solver.LossSpec:
        return solver.LossSpec(self.loss_variant, self.n_target, self.weight_number,
                               self.site_a, self.site_b, self.weight_peak,
                               self.weight_balance)

    def train_config(self) -> solver.TrainConfig:
        return solver.TrainConfig(epochs=self.epochs, learning_rate=self.learning_rate,
                                  seed=self.seed, grad_mode=self.grad_mode,
                                  fd_step=self.fd_step, history_stride=self.history_stride)

    def hamiltonian(self) -> ob.LatticeHamiltonian:
        return ob.LatticeHamiltonian.chain(self.n_sites, self.gamma)

    def validate(self) -> None:
        """Raise :class:`ConfigError` naming the first offending field."""
        if self.n_sites < 1:
            raise ConfigError("n_sites", f"must be >= 1, got {self.n_sites}")
        if not np.isfinite(self.gamma):
            raise ConfigError("gamma", "must be finite")
        if not np.isfinite(self.n_target) or self.n_target < 0:
            raise ConfigError("n_target", f"must be finite and >= 0, got {self.n_target}")
        if self.loss_variant not in ("single", "bound"):
            raise ConfigError("loss_variant", f"must be 'single' or 'bound', "
                              f"got {self.loss_variant!r}")
        for name in ("weight_number", "weight_peak", "weight_balance"):
            w = getattr(self, name)
            if not (np.isfinite(w) and w >= 0):
                raise ConfigError(name, f"must be finite and >= 0, got {w}")
        if self.loss_variant == "bound":
            for name in ("site_a", "site_b"):
                if getattr(self, name) is None:
                    raise ConfigError(name, "required when loss_variant = bound")
            if not 0 <= self.site_a < self.n_sites:
                raise ConfigError("site_a", f"must lie in [0, {self.n_sites}), got {self.site_a}")
            if not self.site_a < self.site_b < self.n_sites:
                raise ConfigError("site_b", f"must lie in ({self.site_a}, {self.n_sites}), "
                                  f"got {self.site_b}")
        if self.epochs < 1:
            raise ConfigError("epochs", f"must be >= 1, got {self.epochs}")
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate", f"must be positive, got {self.learning_rate}")
        if self.grad_mode not in ("analytic", "finite_difference"):
            raise ConfigError("grad_mode", f"must be 'analytic' or 'finite_difference', "
                              f"got {self.grad_mode!r}")
        if not self.fd_step > 0:
            raise ConfigError("fd_step", f"must be positive, got {self.fd_step}")
        if self.history_stride < 1:
            raise ConfigError("history_stride", f"must be >= 1, got {self.history_stride}")
        if not self.output_dir:
            raise ConfigError("output_dir", "must not be empty")

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            lines.append(f"{f.name} = {'none' if v is None else repr(v) if isinstance(v, float) else v}")
        return "\n".join(lines) + "\n"


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def _convert(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    if "None" in kind and raw.lower() == "none":
        return None
    try:
        if kind.startswith("int"):
            return int(raw)
        if kind.startswith("float"):
            return float(raw)
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r} as {kind.split(' ')[0]}") from None
    return raw


def parse_config(text: str) -> ExperimentConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment. Validates the result."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, "given twice")
        values[key] = _convert(key, raw)
    config = ExperimentConfig(**values)
    config.validate()
    return config


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("path", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and an atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def entanglement_report(state: GaussianState, part: Bipartition) -> dict:
    c = symplectic_eigenvalues(partial_transpose(state, part))
    return {"alice_modes": sorted(part.alice_modes),
            "log_negativity": log_negativity(state, part),
            "symplectic_eigenvalues": [float(x) for x in c]}


def _default_alice(config: ExperimentConfig) -> Bipartition:
    if config.loss_variant == "bound":
        return Bipartition([config.site_a])
    return Bipartition.soliton_site(config.n_sites) if config.n_sites >= 3 else Bipartition([0])


def run_experiment(config: ExperimentConfig, log=print) -> int:
    """Train from the seeded initialization and write all artifacts."""
    config.validate()
    out = Path(config.output_dir)
    h = config.hamiltonian()
    spec = config.loss_spec()
    checkpoint = out / "checkpoint_params.json"

    def on_record(epoch, params, row):
        payload = dict(params.to_dict(), epoch=epoch)
        atomic_write(checkpoint, json.dumps(payload) + "\n")

    init = solver.initial_params(config.n_sites, config.seed)
    try:
        params, history = solver.train(init, spec, h, config.train_config(), on_record)
    except solver.TrainingDiverged as exc:
        log(f"error: training diverged at epoch {exc.epoch}: {exc}; "
            f"last checkpoint kept at {checkpoint}")
        return EXIT_DIVERGED
    state = prepare_state(params)
    atomic_write(out / "history.csv", history.to_csv())
    atomic_write(out / "final_params.json", params.to_json() + "\n")
    atomic_write(out / "final_state.json", state.to_json() + "\n")
    atomic_write(out / "site_profile.csv", ob.site_profile_csv(state))
    if config.n_sites >= 2:
        report = entanglement_report(state, _default_alice(config))
        atomic_write(out / "entanglement.json", json.dumps(report, indent=2) + "\n")
    last = history.rows[-1]
    log(f"epochs={last[0]} loss={last[1]:.6g} mean_H={last[2]:.6g} "
        f"mean_N={last[3]:.6g} log_negativity={last[4]:.6g}")
    log(f"artifacts written to {out}")
    return 0


def _load_state(path) -> GaussianState:
    return GaussianState.from_json(Path(path).read_text())


def _parse_alice(text: str | None, n: int) -> Bipartition:
    if text is None:
        return Bipartition.soliton_site(n) if n >= 3 else Bipartition([0])
    return Bipartition([int(s) for s in text.split(",") if s.strip()])


def cmd_train(args) -> int:
    try:
        config = load_config(args.config)
        config.loss_spec().validate(config.n_sites)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run_experiment(config)


def cmd_analyze(args) -> int:
    try:
        state = _load_state(args.state)
        part = _parse_alice(args.alice, state.n_modes)
        part.validate(state.n_modes)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    summary = {"n_modes": state.n_modes,
               "total_photon": ob.total_photon(state),
               "mean_photon": [float(x) for x in ob.photon_numbers(state)]}
    if args.gamma is not None:
        h = ob.LatticeHamiltonian.chain(state.n_modes, args.gamma)
        summary["mean_H"] = ob.hamiltonian_expectation(state, h)
    summary.update(entanglement_report(state, part))
    print(json.dumps(summary, indent=2))
    if args.output_dir:
        out = Path(args.output_dir)
        atomic_write(out / "entanglement.json", json.dumps(entanglement_report(state, part),
                                                           indent=2) + "\n")
        atomic_write(out / "site_profile.csv", ob.site_profile_csv(state))
    return 0


def cmd_sample(args) -> int:
    try:
        state = _load_state(args.state)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    scan = sampling.pair_probability_scan(state, args.total)
    out = Path(args.output_dir) if args.output_dir else Path(args.state).parent
    atomic_write(out / "pair_scan.csv", sampling.pair_scan_csv(scan))
    a, b = np.unravel_index(np.argmax(scan), scan.shape)
    print(f"max probability {scan[a, b]:.6g} at sites ({a}, {b}); "
          f"pair_scan.csv written to {out}")
    return 0


def cmd_validate(args) -> int:
    results = validate.run_suite(quick=args.quick)
    for r in results:
        print(r.line())
    out = Path(args.output_dir) if args.output_dir else Path(".")
    atomic_write(out / "validation_report.json", validate.report_json(results) + "\n")
    ok = all(r.passed for r in results)
    print("all checks passed" if ok else "some checks FAILED")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="solitonlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the variational ansatz from a config file")
    p.add_argument("--config", required=True, help="key = value config file")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("analyze", help="photon numbers and log-negativity of a saved state")
    p.add_argument("--state", required=True, help="final_state.json")
    p.add_argument("--alice", help="comma-separated Alice sites (default n//2 + 1)")
    p.add_argument("--gamma", type=float, help="also report <H> on the open chain")
    p.add_argument("--output-dir", help="write entanglement.json and site_profile.csv here")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sample", help="pair-pattern probability scan of a saved state")
    p.add_argument("--state", required=True, help="final_state.json")
    p.add_argument("--total", type=int, choices=(2, 4), required=True)
    p.add_argument("--output-dir", help="defaults to the state file's directory")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("validate", help="cross-check closed forms against the oracles")
    p.add_argument("--quick", action="store_true", help="reduced case counts")
    p.add_argument("--output-dir", help="where to write validation_report.json")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)
