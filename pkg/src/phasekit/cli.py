"""Command-line front end.

Every command prints JSON (or CSV where noted) to stdout or ``--output``.
Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .applications import (
    ENTANGLEMENT_NOTE,
    DihedralInstance,
    dihedral_estimate_experiment,
    dihedral_model,
    phase_circuit,
    product_state_cost,
    shor_multipliers,
    symmetric_model,
)
from .cost import KINDS, average_cost_fourier, average_cost_quadrature, is_holevo, make_cost
from .optstate import NumericalError, closed_form_min_cost, closed_form_state, optimal_state
from .povm import SeedMatrix, discretization_check, optimal_seed, validate_seed
from .simulate import PriorSpec, analytic_uniform_cost, monte_carlo
from .spectrum import CanonicalModel, PhaseNetwork, canonicalize, subset_sum_spectrum

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


class CLIError(ValueError):
    pass


def _angle(value: float, turns: bool) -> float:
    return 2 * np.pi * value if turns else value


def _parse_json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CLIError(f"{what} is not valid JSON: {exc}") from exc


def _parse_state(text: str) -> np.ndarray:
    """Amplitudes as a JSON list of reals or ``[re, im]`` pairs."""
    data = _parse_json_arg(text, "--state")
    if not isinstance(data, list):
        raise CLIError("--state must be a JSON array")
    return np.array([complex(*v) if isinstance(v, list) else complex(v) for v in data])


def _model_from_args(args) -> CanonicalModel:
    if args.amplitudes is not None:
        return CanonicalModel(np.asarray(_parse_json_arg(args.amplitudes, "--amplitudes"), dtype=float))
    if args.state_kind is None or args.q is None:
        raise CLIError("give --amplitudes, or --state-kind with --q")
    return CanonicalModel(closed_form_state(args.state_kind, args.q))


def _cost_from_args(args, q: int, model: CanonicalModel | None = None):
    eps = None if args.eps is None else _angle(args.eps, args.turns)
    coeffs = None if args.coeffs is None else _parse_json_arg(args.coeffs, "--coeffs")
    return make_cost(args.cost, q, epsilon=eps, model=model, custom_coeffs=coeffs)


def cmd_analyze(args) -> dict:
    mults = _parse_json_arg(args.multipliers, "--multipliers")
    network = PhaseNetwork.from_json(json.dumps(mults))
    spec = subset_sum_spectrum(network)
    out = {
        "multipliers": list(network.multipliers),
        "total": network.total,
        "spectrum": spec.tolist(),
        "complete": spec.is_complete(),
        "multiplicity_free": spec.is_multiplicity_free(),
    }
    if args.state is not None:
        out["model"] = canonicalize(network, _parse_state(args.state)).to_dict()
    return out


def cmd_optimal(args) -> dict:
    q = args.q
    cost = _cost_from_args(args, q)
    res = optimal_state(cost, q)
    seed = optimal_seed(cost, q)
    report = validate_seed(seed)
    if not report.ok:
        raise NumericalError("optimal seed is infeasible: " + "; ".join(report.violations))
    out = res.to_dict()
    out.update({
        "holevo": res.holevo,
        "seed": {"all_ones": bool(np.all(seed.entries == 1)), "min_eigenvalue": report.min_eigenvalue},
        "measurement": {"dimension": q},
    })
    closed = {"half_angle": "half_angle", "variance": "variance", "window": "window"}.get(cost.label)
    if closed:
        out["closed_form_min_cost"] = closed_form_min_cost(closed, q, cost.epsilon)
    return out


def cmd_cost(args) -> dict:
    model = _model_from_args(args)
    q = model.q
    cost = _cost_from_args(args, q, model)
    holevo = is_holevo(cost, q)
    out = {
        "q": q,
        "cost": cost.to_dict(),
        "holevo": holevo,
        "fourier": average_cost_fourier(model, SeedMatrix.ones(q), cost),
        "quadrature": average_cost_quadrature(model, cost, args.grid or 4 * q),
    }
    if holevo:
        cont, disc = discretization_check(model, cost)
        out["discrete"] = disc
        out["continuous"] = cont
    return out


def _prior_from_args(args) -> PriorSpec:
    if args.point_mass is not None:
        return PriorSpec.point_mass(_angle(args.point_mass, args.turns))
    return PriorSpec()


def cmd_simulate(args):
    model = _model_from_args(args)
    cost = _cost_from_args(args, model.q, model)
    rep = monte_carlo(model, cost, _prior_from_args(args), args.trials, args.seed,
                      uniformize=args.uniformize, threads=_threads(args), trace=args.trace)
    if args.trace:
        return rep.trace_csv()
    out = rep.to_dict()
    out["analytic_uniform_cost"] = analytic_uniform_cost(model, cost)
    return out


def cmd_example1(args) -> dict:
    N = args.N
    prod = product_state_cost(N)
    best = closed_form_min_cost("half_angle", N + 1)
    model = symmetric_model(N, 2 ** -0.5, 2 ** -0.5)
    return {
        "N": N,
        "product_cost": prod,
        "optimal_cost": best,
        "gap": prod - best,
        "product_amplitudes": [float(v) for v in model.amplitudes],
        "optimal_amplitudes": [float(v) for v in closed_form_state("sine", N + 1)],
        "note": ENTANGLEMENT_NOTE,
    }


def cmd_shor(args) -> dict:
    network = shor_multipliers(args.L)
    spec = subset_sum_spectrum(network)
    plus = np.full(2, 2 ** -0.5)
    state = plus
    for _ in range(args.L - 1):
        state = np.kron(state, plus)
    model = canonicalize(network, state) if args.L <= 24 else None
    q = network.total + 1
    out = {
        "L": args.L,
        "multipliers": list(network.multipliers),
        "q": q,
        "multiplicity_free": spec.is_multiplicity_free(),
        "complete": spec.is_complete(),
        "measurement": {"dimension": q, "basis": "qft"},
    }
    if model is not None:
        out["product_state_uniform"] = bool(np.allclose(model.amplitudes, closed_form_state("uniform", q)))
    return out


def cmd_dihedral(args):
    if args.samples is not None:
        samples = _parse_json_arg(args.samples, "--samples")
        model, spec = dihedral_model(DihedralInstance(args.n, tuple(samples)))
        return {"n": args.n, "samples": samples, "q": model.q, "multiplicities": spec.tolist(),
                "model": model.to_dict()}
    rep = dihedral_estimate_experiment(args.n, args.m, args.trials, args.seed)
    return rep.histogram_csv() if args.format == "csv" else rep.to_dict()


def cmd_circuit(args) -> dict:
    phi = _angle(args.phi, args.turns)
    gates, check = phase_circuit(args.bits, phi)
    out = {
        "bits": args.bits,
        "phi": phi,
        "gates": [list(g) for g in gates.gates],
        "max_error": check.max_error,
        "verified": check.passed,
    }
    if args.k is not None:
        if not 0 <= args.k < 2 ** args.bits:
            raise CLIError(f"--k must lie in [0, {2 ** args.bits})")
        z = gates.phase_of(args.k, phi)
        out["k"] = args.k
        out["phase"] = float(np.mod(np.angle(z), 2 * np.pi))
        out["expected_phase"] = float(np.mod(args.k * phi, 2 * np.pi))
    return out


def cmd_selftest(args):
    from .selftest import run_all

    results = run_all()
    return {"passed": all(r.passed for r in results),
            "criteria": [{"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail}
                         for r in results]}, "\n".join(r.line() for r in results)


def _threads(args) -> int:
    env = os.environ.get("PHASEKIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise CLIError("PHASEKIT_THREADS must be an integer") from exc
    return max(1, args.threads)


def _add_cost_args(p, default="variance"):
    p.add_argument("--cost", choices=KINDS, default=default)
    p.add_argument("--eps", type=float, help="window half-width (radians, or turns with --turns)")
    p.add_argument("--coeffs", help="custom cost coefficients as a JSON array")


def _add_model_args(p):
    p.add_argument("--amplitudes", help="canonical amplitudes x_k as a JSON array")
    p.add_argument("--state-kind", choices=("sine", "uniform"))
    p.add_argument("--q", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasekit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--output", "-o", help="write to this file instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--turns", action="store_true", help="read angles as fractions of 2 pi")
    parser.add_argument("--threads", type=int, default=1)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="subset-sum spectrum and canonical model")
    p.add_argument("--multipliers", required=True, help="JSON array of positive integers")
    p.add_argument("--state", help="input amplitudes (reals or [re, im] pairs), length 2**L")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("optimal", help="cost-optimal input state and measurement")
    _add_cost_args(p)
    p.add_argument("--q", type=int, required=True)
    p.set_defaults(func=cmd_optimal)

    p = sub.add_parser("cost", help="average cost of a model, by Fourier sum and by quadrature")
    _add_model_args(p)
    _add_cost_args(p)
    p.add_argument("--grid", type=int)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of the average cost")
    _add_model_args(p)
    _add_cost_args(p)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--point-mass", type=float, help="fixed true phase instead of a uniform prior")
    p.add_argument("--uniformize", action="store_true")
    p.add_argument("--trace", action="store_true", help="emit a CSV trace of every trial")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("example1", help="N identical qubits: product state vs optimum")
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_example1)

    p = sub.add_parser("shor", help="binary-weight network")
    p.add_argument("--L", type=int, required=True)
    p.set_defaults(func=cmd_shor)

    p = sub.add_parser("dihedral", help="dihedral HSP phase estimation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--samples", help="fixed samples as a JSON array (reports the model only)")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_dihedral)

    p = sub.add_parser("circuit", help="binary phase-shift circuit")
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("selftest", help="run the acceptance checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (CLIError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    if args.command == "selftest":
        data, table = result
        print(table, file=sys.stderr)
        _emit(json.dumps(data, indent=2) + "\n", args.output)
        return EXIT_OK if data["passed"] else EXIT_NUMERICAL
    if isinstance(result, str):
        _emit(result, args.output)
    else:
        if "seed" in vars(args) and isinstance(result, dict):
            result.setdefault("rng_seed", args.seed)
        _emit(json.dumps(result, indent=2, sort_keys=True) + "\n", args.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
