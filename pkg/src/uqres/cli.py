"""Batch command-line front end.

``uqres <measure|interference|wigner|circuit|protocol|hamiltonian|algorithm|make-goldens>
[--in PATH]... [--out PATH] [--seed N] [--tol X] [--cap N]``

Reports are JSON (sorted keys, fixed layout) embedding the toolkit version,
seed and tolerances, so identical configurations produce byte-identical
files.  Exit codes: 0 success, 2 parse error, 3 invariant/constraint
violation, 4 resource/dimension cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import algorithms as alg
from . import circuits as qc
from . import hamiltonian as ham
from . import interference as itf
from . import measures as ms
from . import protocols as pr
from . import qkernel as qk
from . import wigner as wg
from .qkernel import CapExceededError, InvariantError, ResourceError, UqresError

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_CAP = 4


class ParseFailure(UqresError):
    """Malformed input file or unusable document structure."""


# ---------------------------------------------------------------------------
# Serialization helpers
# ---------------------------------------------------------------------------

def _pair(z) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _from_pair(v) -> complex:
    return complex(v[0], v[1])


def vector_from_json(doc: dict) -> qk.StateVector:
    try:
        dims = tuple(int(d) for d in doc["dims"])
        amps = np.array([_from_pair(v) for v in doc["amplitudes"]])
    except (KeyError, TypeError, IndexError) as exc:
        raise ParseFailure(f"bad state document: {exc}") from exc
    return qk.StateVector(qk.HilbertSpec(dims), amps)


def vector_to_json(state: qk.StateVector) -> dict:
    return {"dims": list(state.spec.dims),
            "amplitudes": [_pair(z) for z in state.amplitudes]}


def density_from_json(doc: dict) -> qk.DensityOperator:
    if "amplitudes" in doc:
        return vector_from_json(doc).density()
    try:
        dims = tuple(int(d) for d in doc["dims"])
        mat = np.array([[_from_pair(v) for v in row] for row in doc["matrix"]])
    except (KeyError, TypeError, IndexError) as exc:
        raise ParseFailure(f"bad state document: {exc}") from exc
    return qk.DensityOperator(qk.HilbertSpec(dims), mat)


def matrix_from_json(rows) -> np.ndarray:
    try:
        return np.array([[_from_pair(v) for v in row] for row in rows])
    except (TypeError, IndexError) as exc:
        raise ParseFailure(f"bad matrix: {exc}") from exc


def matrix_to_json(m: np.ndarray) -> list:
    return [[_pair(z) for z in row] for row in np.asarray(m, dtype=complex)]


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseFailure(f"cannot read {path}: {exc}") from exc


def _report(args, results) -> dict:
    return {"toolkit_version": __version__,
            "seed": args.seed,
            "tolerance": args.tol,
            "dimension_cap": args.cap,
            "results": results}


def _emit(args, doc: dict) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_measure(args) -> int:
    doc = _load_json(_one_input(args))
    rho = density_from_json(doc)
    wanted = [m.strip() for m in args.measures.split(",") if m.strip()]
    evaluators = {
        "l1": lambda: ms.l1_coherence(rho),
        "log": lambda: ms.log_coherence(rho),
        "rel": lambda: ms.rel_ent_coherence(rho),
    }
    unknown = [m for m in wanted if m not in evaluators]
    if unknown:
        raise ParseFailure(f"unknown measures {unknown}; choose from {sorted(evaluators)}")
    results = [ms.MeasureReport(measure=name, value=evaluators[name](),
                                tolerance=args.tol).to_dict()
               for name in wanted]
    _emit(args, _report(args, results))
    return EXIT_OK


def cmd_interference(args) -> int:
    doc = _load_json(_one_input(args))
    circuit = qc.circuit_from_json(doc)
    u = np.eye(circuit.wires.total_dim, dtype=complex)
    mux_layout = None
    for ins in circuit.instructions:
        if isinstance(ins, qc.Gate):
            u = qk.embed_operator(ins.matrix, ins.wires, circuit.wires.dims) @ u
        elif isinstance(ins, qc.Mux):
            u = qk.embed_operator(qc._mux_matrix(ins, circuit.wires.dims),
                                  (ins.control,) + ins.targets, circuit.wires.dims) @ u
            mux_layout = ins
        else:
            raise InvariantError("interference analysis requires a unitary-only circuit")
    results = {"relative_entropy": itf.interference_power(u, "relative_entropy"),
               "l1": itf.interference_power(u, "l1"),
               "log": itf.interference_power(u, "log")}
    whole_circuit_mux = (mux_layout is not None and len(circuit.wires.dims) == 2
                         and mux_layout.control == 0 and mux_layout.targets == (1,))
    if whole_circuit_mux:
        cu = itf.Multiplexer(mux_layout.branches)
        rng = np.random.default_rng(args.seed)
        v = qk.haar_unitary(cu.control_dim, rng)
        r1, r2 = itf.interference_additivity_check(v, cu)
        results["additivity_residuals_random_control"] = [r1, r2]
    _emit(args, _report(args, results))
    return EXIT_OK


def cmd_wigner(args) -> int:
    doc = _load_json(_one_input(args))
    rho = density_from_json(doc)
    d = rho.spec.total_dim
    table = wg.wigner_function(rho, d)
    results = {"d": d,
               "table": [[float(v) for v in row] for row in table.values],
               "sum_negativity": wg.sum_negativity(table),
               "mana": wg.mana(rho, d)}
    _emit(args, _report(args, results))
    return EXIT_OK


def cmd_circuit(args) -> int:
    paths = args.inputs
    circuit = qc.circuit_from_json(_load_json(paths[0]))
    if len(paths) > 1:
        state = vector_from_json(_load_json(paths[1]))
    else:
        state = qk.zero_state(circuit.wires.dims)
    branches = qc.simulate(circuit, state)
    results = {
        "free_circuit": qc.free_circuit_check(circuit),
        "branches": [{"outcomes": b.outcomes, "probability": b.probability,
                      "state": vector_to_json(b.state)} for b in branches],
        "branch_probability_sum": float(sum(b.probability for b in branches)),
    }
    _emit(args, _report(args, results))
    return EXIT_OK


def cmd_protocol(args) -> int:
    rng = np.random.default_rng(args.seed)
    config = _load_json(args.config) if args.config else {}
    name = args.name
    if name == "chsh":
        results = {"win_rate_exhaustive": pr.chsh_game(),
                   "win_rate_sampled": pr.chsh_game(rounds=int(config.get("rounds", 1000)),
                                                    rng=rng),
                   "verdict": "pass"}
    elif name == "btt":
        psi = (vector_from_json(config["state"]) if "state" in config
               else qk.random_state((2,), rng))
        key = pr.PauliKey(*config.get("key", (1, 1)))
        worst = 1.0
        transcripts_ok = True
        for prob, res in pr.btt_branches(psi, key):
            dec = pr.decrypt_pads(res.output, [(res.new_key.a, res.new_key.b)])
            t_psi = qk.apply_unitary(psi, qk.T)
            worst = min(worst, qk.state_fidelity(dec, t_psi))
            transcripts_ok &= pr.lobc_violations(res.transcript) == 0
        results = {"min_fidelity": worst, "lobc_clean": bool(transcripts_ok),
                   "verdict": "pass" if worst >= 1 - 1e-10 and transcripts_ok else "fail"}
        if results["verdict"] == "fail":
            _emit(args, _report(args, results))
            raise InvariantError("btt verification failed")
    elif name == "pmqc":
        programs = tuple(tuple(g) for g in config.get("programs", [["H", "T"]]))
        cz_after = tuple(config["cz_after"]) if "cz_after" in config else None
        nq = len(programs)
        plaintext = (vector_from_json(config["state"]) if "state" in config
                     else qk.random_state((2,) * nq, rng))
        resources = None
        if "resources" in config:
            resources = pr.PMQCResources(int(config["resources"]["ebits"]),
                                         int(config["resources"]["pr_boxes"]))
        src = pr.SamplingSource(rng)
        res = pr.pmqc_run(plaintext, programs, cz_after, source=src, resources=resources)
        dec = pr.decrypt_pads(res.output, res.keys)
        ideal = qk.StateVector(plaintext.spec,
                               pr.program_unitary(programs, cz_after) @ plaintext.amplitudes)
        fid = qk.state_fidelity(dec, ideal)
        results = {"fidelity": fid,
                   "ebits_consumed": res.ebits_consumed,
                   "pr_boxes_consumed": res.pr_boxes_consumed,
                   "t_events": res.t_events,
                   "lobc_clean": pr.lobc_violations(res.transcript) == 0,
                   "verdict": "pass" if fid >= 1 - 1e-9 else "fail"}
        if results["verdict"] == "fail":
            _emit(args, _report(args, results))
            raise InvariantError("pmqc verification failed")
    elif name == "mbqc":
        angles = [float(a) for a in config.get("angles", [0.0])]
        psi = (vector_from_json(config["state"]) if "state" in config
               else qk.random_state((2,), rng))
        branches = pr.mbqc_gate(angles, psi, adaptive=bool(config.get("adaptive", True)))
        target = qk.StateVector(psi.spec, pr.mbqc_target(angles) @ psi.amplitudes)
        fids = [qk.state_fidelity(b.corrected, target) for b in branches]
        results = {"branches": len(branches), "min_fidelity": min(fids),
                   "verdict": "pass" if min(fids) >= 1 - 1e-9 else "fail"}
    else:
        raise ParseFailure(f"unknown protocol {name!r}")
    _emit(args, _report(args, results))
    return EXIT_OK


def cmd_hamiltonian(args) -> int:
    action = args.action
    if action == "stoquastic":
        doc = _load_json(_one_input(args))
        h = (ham.termsum_from_json(doc) if "terms" in doc
             else matrix_from_json(doc["matrix"]))
        results = {"stoquastic": ham.is_stoquastic(h)}
    elif action == "trotter":
        doc = _load_json(_one_input(args))
        terms = ham.termsum_from_json(doc)
        t, steps = float(args.time), int(args.steps)
        results = {"time": t, "steps": steps,
                   "error": ham.trotter_error(terms, t, steps),
                   "error_half_steps": ham.trotter_error(terms, t, max(1, steps // 2))}
    elif action == "hqca":
        doc = _load_json(_one_input(args))
        layers = [{int(k): int(v) for k, v in layer.items()} for layer in doc["layers"]]
        data = vector_from_json(doc["data"])
        out = ham.hqca_run(layers, data)
        direct = ham.hqca_direct(layers, data)
        fid = qk.state_fidelity(out, direct)
        results = {"fidelity_vs_direct": fid, "layers": len(layers)}
    elif action == "history":
        length = int(args.length)
        us = [np.eye(2, dtype=complex)] * length
        hs = ham.history_state(us, qk.zero_state((2,)))
        results = {"L": length,
                   "clock_probabilities": [float(p) for p in ham.clock_probabilities(hs)]}
    elif action == "gap":
        doc = _load_json(_one_input(args))
        h0 = matrix_from_json(doc["h_start"])
        h1 = matrix_from_json(doc["h_end"])
        scan = ham.adiabatic_gap_scan(h0, h1, int(args.grid))
        if args.out:
            with open(args.out, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["t", "gap"])
                for s, gap in scan:
                    writer.writerow([f"{s:.10f}", f"{gap:.12f}"])
            s_min, g_min = ham.min_gap(scan)
            sys.stdout.write(json.dumps({"min_gap": g_min, "at": s_min}) + "\n")
            return EXIT_OK
        s_min, g_min = ham.min_gap(scan)
        results = {"scan": [[s, g] for s, g in scan], "min_gap": g_min, "at": s_min}
    else:
        raise ParseFailure(f"unknown hamiltonian action {action!r}")
    _emit(args, _report(args, results))
    return EXIT_OK


def cmd_algorithm(args) -> int:
    rng = np.random.default_rng(args.seed)
    config = _load_json(args.config) if args.config else {}
    name = args.name
    if name == "one-control":
        n = int(config.get("qubits", 2))
        eps = float(config.get("epsilon", 0.01))
        u = (matrix_from_json(config["u"]) if "u" in config
             else qk.haar_unitary(2 ** n, rng))
        report = alg.one_control_report(u, eps)
    elif name == "lcu":
        coeffs = np.array([_from_pair(v) for v in config.get(
            "coeffs", [[2 ** -0.5, 0.0], [2 ** -0.5, 0.0]])])
        us = ([matrix_from_json(m) for m in config["unitaries"]]
              if "unitaries" in config else [qk.X, qk.Z])
        psi = (vector_from_json(config["state"]) if "state" in config
               else qk.zero_state((us[0].shape[0],)))
        out, prob = alg.lcu_apply(coeffs, us, psi)
        report = alg.AlgorithmReport(
            algorithm="linear-combination-of-unitaries",
            parameters={"terms": len(us)},
            success_probabilities=(prob,))
    elif name == "grover":
        report = alg.grover_report(int(config.get("n", 2)),
                                   int(config.get("marked", 0)),
                                   int(config.get("iterations", 1)))
    elif name == "sandwich":
        d1 = int(config.get("control_dim", 2))
        d2 = int(config.get("data_dim", 2))
        cu = itf.Multiplexer(tuple(qk.haar_unitary(d2, rng) for _ in range(d1)))
        v, w = qk.haar_unitary(d1, rng), qk.haar_unitary(d1, rng)
        direct = alg.sandwiched_interference(v, cu, w)
        via_dual = itf.interference_power(
            np.kron(v, np.eye(d2)) @ cu.matrix @ np.kron(w, np.eye(d2)))
        report = alg.AlgorithmReport(
            algorithm="sandwiched-circuit",
            parameters={"control_dim": d1, "data_dim": d2},
            interference_terms={"formula": direct, "dual_state": via_dual},
            residuals={"route_mismatch": abs(direct - via_dual)})
    else:
        raise ParseFailure(f"unknown algorithm {name!r}")
    _emit(args, _report(args, report.to_dict()))
    return EXIT_OK


def cmd_make_goldens(args) -> int:
    outdir = Path(args.out or "goldens")
    outdir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    gates = ["H", "X", "Y", "Z", "T", "S", "CX", "CZ", "CCX"]
    interference_table = {name: itf.interference_power(qk.GATES[name]) for name in gates}

    one_control_table = {}
    for eps in (1e-3, 1e-2, 0.1):
        v = alg.rotation_v(eps)
        one_control_table[f"{eps:g}"] = {
            "c_l1": itf.interference_power(v, "l1"),
            "c_rel": itf.interference_power(v),
            "residual_random_u": alg.one_control_interference_decomposition(
                qk.haar_unitary(4, rng), eps),
        }

    stab = wg.stabilizer_states(3)
    mana_table = [wg.mana(s, 3) for s in stab.states]

    hw = ham.walk_hamiltonian(3)
    scan = ham.adiabatic_gap_scan(qk.Z / np.sqrt(2), qk.X / np.sqrt(2), 101)
    s_min, g_min = ham.min_gap(scan)

    goldens = {
        "interference_relative_entropy": interference_table,
        "one_control_qubit": one_control_table,
        "qutrit_stabilizer_mana": mana_table,
        "walk_hamiltonian_L3": [[float(x.real) for x in row] for row in hw],
        "walk_gap_L3": 1.0 - float(np.cos(np.pi / 4)),
        "unit_norm_z_to_x_min_gap": {"gap": g_min, "at": s_min},
        "chsh_win_rate": pr.chsh_game(),
    }
    (outdir / "goldens.json").write_text(
        json.dumps(_report(args, goldens), sort_keys=True, indent=2) + "\n",
        encoding="utf-8")
    with open(outdir / "gap_scan_unit_norm_z_to_x.csv", "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "gap"])
        for s, gap in scan:
            writer.writerow([f"{s:.10f}", f"{gap:.12f}"])
    sys.stdout.write(f"wrote goldens to {outdir}\n")
    return EXIT_OK


def _one_input(args) -> str:
    if not args.inputs:
        raise ParseFailure("this subcommand needs --in PATH")
    return args.inputs[0]


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--in", dest="inputs", action="append", default=[],
                   metavar="PATH", help="input file (repeatable)")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    p.add_argument("--tol", type=float, default=1e-10, help="tolerance override")
    p.add_argument("--cap", type=int, default=qk.DEFAULT_DIM_CAP,
                   help="dimension cap (default 4096)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uqres", description="quantum-resource analysis toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="coherence measures of a state file")
    p.add_argument("--measures", default="l1,log,rel")
    _add_common(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("interference", help="interference power of a unitary circuit")
    _add_common(p)
    p.set_defaults(func=cmd_interference)

    p = sub.add_parser("wigner", help="Wigner table, negativity and mana of a state")
    _add_common(p)
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("circuit", help="simulate a circuit file (optionally on a state)")
    _add_common(p)
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("protocol", help="run and verify a protocol")
    p.add_argument("name", choices=["btt", "pmqc", "chsh", "mbqc"])
    p.add_argument("--config", default=None, help="protocol config JSON")
    _add_common(p)
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("hamiltonian", help="stoquastic / trotter / hqca / history / gap")
    p.add_argument("action", choices=["stoquastic", "trotter", "hqca", "history", "gap"])
    p.add_argument("--time", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=16)
    p.add_argument("--length", type=int, default=3)
    p.add_argument("--grid", type=int, default=101)
    _add_common(p)
    p.set_defaults(func=cmd_hamiltonian)

    p = sub.add_parser("algorithm", help="algorithm resource reports")
    p.add_argument("name", choices=["one-control", "lcu", "grover", "sandwich"])
    p.add_argument("--config", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_algorithm)

    p = sub.add_parser("make-goldens", help="regenerate the golden acceptance tables")
    _add_common(p)
    p.set_defaults(func=cmd_make_goldens)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseFailure as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except CapExceededError as exc:
        sys.stderr.write(f"cap exceeded: {exc}\n")
        return EXIT_CAP
    except ResourceError as exc:
        sys.stderr.write(f"resource error: {exc}\n")
        return EXIT_INVARIANT
    except InvariantError as exc:
        sys.stderr.write(f"invariant violation: {exc}\n")
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
