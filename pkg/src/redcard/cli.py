"""``redcard`` command line: dla, decompose, synthesize, verify, emit, bench.

Every JSON document carries the fully resolved configuration that produced it
and is written with sorted keys, so the same seed and flags give identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from redcard.errors import RedCarDError

EXIT_STAGE_ERROR = 1


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _threads() -> int:
    raw = os.environ.get("REDCARD_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise RedCarDError(f"REDCARD_THREADS must be an integer, got {raw!r}") from None


# -- argument groups --------------------------------------------------------------

def _add_model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--model", required=True, choices=["tfim", "tfxy", "xy", "heisenberg"])
    g.add_argument("--sites", type=int, required=True)
    g.add_argument("-J", dest="J", type=float, default=1.0)
    g.add_argument("-Jx", dest="Jx", type=float)
    g.add_argument("-Jy", dest="Jy", type=float)
    g.add_argument("-Jz", dest="Jz", type=float)
    g.add_argument("-g", dest="g", type=float, default=0.5)
    g.add_argument("--periodic", action="store_true")


def _add_structure_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--h-seed", help="string seeding the Cartan subalgebra (default: first in canonical order)")
    p.add_argument("--b-order", help="comma-separated permutation of the reduced generators, e.g. 2,0,1")


def _add_optimizer_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("optimizer")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--backend", choices=["exact", "shots"], default="exact")
    g.add_argument("--shots", type=int, default=800)
    g.add_argument("--depol", type=float, default=0.0)
    g.add_argument("--tol", type=float, default=1e-10, help="relative cost improvement that ends a fragment")
    g.add_argument("--max-iters", type=int, default=100_000)
    g.add_argument("--patience", type=int, default=3)
    g.add_argument("--residual-target", type=float, default=0.01)
    g.add_argument("--ansatz", choices=["product", "compressed"], default="product")


def _model_spec(args):
    from redcard.models import ModelSpec

    return ModelSpec(args.model, args.sites, J=args.J, g=args.g, Jx=args.Jx, Jy=args.Jy,
                     Jz=args.Jz, periodic=args.periodic)


def _hamiltonian(args):
    import warnings

    from redcard.models import build

    spec = _model_spec(args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if spec.periodic:
            print("warning: periodic boundary is experimental", file=sys.stderr)
        return spec, build(spec)


def _b_order(args) -> list[int] | None:
    if not getattr(args, "b_order", None):
        return None
    return [int(x) for x in args.b_order.split(",")]


def _synth_config(args):
    from redcard.optimize import SynthesisConfig

    return SynthesisConfig(seed=args.seed, tol=args.tol, max_iters=args.max_iters,
                           backend=args.backend, shots=args.shots, depol=args.depol,
                           patience=args.patience, residual_target=args.residual_target,
                           ansatz=args.ansatz, h_seed=args.h_seed, b_order=_b_order(args))


# -- commands -------------------------------------------------------------------

def cmd_dla(args) -> int:
    from redcard.algebra import frustration_components, generate_dla

    spec, ham = _hamiltonian(args)
    dla = generate_dla(ham, args.max_dim)
    graph = frustration_components(dla)
    doc = {
        "config": {"model": spec.to_dict(), "max_dim": args.max_dim},
        "dim": dla.dim,
        "basis": [p.label for p in dla.basis],
        "components": [[dla.basis[i].label for i in graph.component(c)] for c in range(graph.n_components)],
        "generator_indices": list(dla.generator_indices),
    }
    if args.json:
        _write(_dump(doc), args.out)
    else:
        _write(f"dim {dla.dim}, {graph.n_components} frustration component(s)\n"
               + "".join(f"  {p.label}\n" for p in dla.basis), args.out)
    return 0


def cmd_decompose(args) -> int:
    from redcard.cartan import decompose
    from redcard.pauli import PauliString

    spec, ham = _hamiltonian(args)
    seed = PauliString.from_label(args.h_seed, ham.n_qubits) if args.h_seed else None
    st = decompose(ham, seed=seed, b_order=_b_order(args))
    doc = st.to_dict()
    doc["ordering_report"] = st.ordering_report().to_dict()
    doc["config"] = {"model": spec.to_dict(), "h_seed": args.h_seed, "b_order": _b_order(args)}
    if args.json:
        _write(_dump(doc), args.out)
    else:
        lines = [f"k dim {doc['k_dim']}, m dim {doc['m_dim']}",
                 "h: " + " ".join(doc["h"]),
                 "b: " + " ".join(doc["b"]),
                 "fragment sizes: " + " ".join(map(str, doc["fragment_sizes"]))]
        _write("\n".join(lines) + "\n", args.out)
    return 0


def _trace_csv(trace: list[dict]) -> str:
    buf = io.StringIO()
    cols = ["fragment", "sweep", "calls", "cost", "staging", "residual"]
    w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for row in trace:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def cmd_synthesize(args) -> int:
    from redcard.optimize import run_redcard, run_standard

    spec, ham = _hamiltonian(args)
    cfg = _synth_config(args)
    run = run_standard if args.method == "standard" else run_redcard
    result = run(ham, cfg)
    doc = result.to_dict()
    doc["config"] = {**doc["config"], "method": args.method, "model": spec.to_dict()}
    text = _dump(doc)
    if args.out:
        _write(text, args.out)
    if args.json or not args.out:
        _write(text, None)
    if args.csv:
        _write(_trace_csv(result.residual_trace), args.csv)
    status = "converged" if result.converged else "NOT converged"
    print(f"residual {result.residual:.3e}, {result.cost_calls} cost calls, {status}", file=sys.stderr)
    return 0


def _load_result(path: str):
    from redcard.optimize import SynthesisResult

    with open(path, encoding="utf-8") as fh:
        return SynthesisResult.from_dict(json.load(fh))


def _circuit_for(result, t: float, compressed: bool, barriers: bool = True, force: bool = False):
    from redcard.cartan import decompose
    from redcard.circuits import build_compressed_tfxy_circuit, build_evolution_circuit

    if compressed or result.ansatz == "compressed":
        st = decompose(result.hamiltonian)
        return build_compressed_tfxy_circuit(result, st, t, barriers, force)
    return build_evolution_circuit(result, None, t, barriers, force)


def _times(raw: str) -> list[float]:
    return [float(x) for x in raw.split(",") if x.strip()]


def cmd_verify(args) -> int:
    from redcard.oracle import circuit_unitary, expm_i, to_dense, unitary_distance

    result = _load_result(args.result)
    h_dense = to_dense(result.hamiltonian)
    h_fro = float(np.linalg.norm(h_dense))
    rows = []
    for t in _times(args.t):
        circ = _circuit_for(result, t, args.compressed, force=args.force)
        d = unitary_distance(circuit_unitary(circ), expm_i(h_dense, t))
        bound = args.factor * result.residual * h_fro * abs(t) + 1e-8
        rows.append({"t": t, "distance": d, "bound": bound, "ok": d <= bound,
                     "gates": len(circ), "cnots": circ.cnot_count()})
    doc = {"config": {"result": os.path.basename(args.result), "factor": args.factor,
                      "compressed": args.compressed},
           "residual": result.residual, "rows": rows,
           "fixed_depth": len({r["gates"] for r in rows}) <= 1,
           "ok": all(r["ok"] for r in rows)}
    if args.json:
        _write(_dump(doc), args.out)
    else:
        out = ["t            distance      bound         gates"]
        out += [f"{r['t']:<12g} {r['distance']:<13.3e} {r['bound']:<13.3e} {r['gates']}" for r in rows]
        _write("\n".join(out) + "\n", args.out)
    return 0 if doc["ok"] and doc["fixed_depth"] else EXIT_STAGE_ERROR


def cmd_emit(args) -> int:
    from redcard.circuits import export_qasm

    if args.state_prep:
        from redcard.pauli import PauliString
        from redcard.qsim import state_prep_circuit

        circ = state_prep_circuit(PauliString.from_label(args.state_prep),
                                  single_ancilla=not args.many_ancillas)
    else:
        if not args.result:
            raise RedCarDError("emit needs --result or --state-prep")
        result = _load_result(args.result)
        circ = _circuit_for(result, args.t, args.compressed, not args.no_barriers, args.force)
    if args.format == "qasm":
        _write(export_qasm(circ), args.out)
    else:
        gates = []
        for g in circ.gates:
            row = {"kind": g.kind}
            if g.kind == "rot":
                row.update(string=g.string.label, angle=g.angle)
            elif g.kind == "cx":
                row.update(control=g.control, target=g.target)
            elif g.qubit is not None:
                row["qubit"] = g.qubit
            gates.append(row)
        _write(_dump({"n_qubits": circ.n_qubits, "n_ancillas": circ.n_ancillas,
                      "cnots": circ.cnot_count(), "gates": gates}), args.out)
    return 0


def _bench_one(payload):
    from redcard.models import ModelSpec, build
    from redcard.optimize import SynthesisConfig, run_redcard, run_standard

    spec, cfg, seed = payload
    ham = build(ModelSpec(**spec))
    out = {}
    for name, run in (("redcard", run_redcard), ("standard", run_standard)):
        r = run(ham, SynthesisConfig(**{**cfg, "seed": seed}))
        ok = r.residual <= cfg["residual_target"] and all(
            i < cfg["max_iters"] for i in r.iterations_per_fragment)
        out[name] = {"seed": seed, "calls": r.cost_calls, "iterations": r.iterations,
                     "residual": r.residual, "converged": ok}
    return out


def bench(spec, cfg, seeds: list[int], workers: int = 1) -> dict:
    """Both pipelines over ``seeds``; statistics over the converging runs."""
    payloads = [(spec.to_dict(), cfg.to_dict(), s) for s in seeds]
    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_bench_one, payloads))
    else:
        runs = [_bench_one(p) for p in payloads]
    report = {"config": {"model": spec.to_dict(), "optimizer": cfg.to_dict(), "seeds": seeds}}
    for name in ("redcard", "standard"):
        rows = [r[name] for r in runs]
        good = [r for r in rows if r["converged"]]
        calls = np.array([r["calls"] for r in good], dtype=float)
        its = np.array([r["iterations"] for r in good], dtype=float)
        report[name] = {
            "runs": rows,
            "converged": len(good),
            "calls_mean": float(calls.mean()) if good else None,
            "calls_std": float(calls.std()) if good else None,
            "iterations_mean": float(its.mean()) if good else None,
            "iterations_std": float(its.std()) if good else None,
        }
    r, s = report["redcard"]["calls_mean"], report["standard"]["calls_mean"]
    report["call_ratio"] = s / r if r and s else None
    return report


def cmd_bench(args) -> int:
    spec, _ = _hamiltonian(args)
    cfg = _synth_config(args)
    if cfg.backend != "exact":
        raise RedCarDError("bench compares both pipelines and needs --backend exact")
    report = bench(spec, cfg, list(range(args.seed, args.seed + args.seeds)), _threads())
    if args.csv:
        rows = [{"method": m, **row} for m in ("redcard", "standard") for row in report[m]["runs"]]
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["method", "seed", "calls", "iterations", "residual", "converged"],
                           lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        _write(buf.getvalue(), args.csv)
    if args.json or not args.csv:
        _write(_dump(report), args.out)
    ok = report["redcard"]["converged"] and report["standard"]["converged"]
    return 0 if ok else EXIT_STAGE_ERROR


# -- entry point ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="redcard", description="Fixed-depth Hamiltonian simulation circuits "
                                 "from a Cartan decomposition solved one fragment at a time.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dla", help="dynamical Lie algebra of a model")
    _add_model_args(p)
    p.add_argument("--max-dim", type=int, default=2 ** 16)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_dla)

    p = sub.add_parser("decompose", help="Cartan decomposition, generators and k fragments")
    _add_model_args(p)
    _add_structure_args(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("synthesize", help="optimize the K angles")
    _add_model_args(p)
    _add_structure_args(p)
    _add_optimizer_args(p)
    p.add_argument("--method", choices=["redcard", "standard"], default="redcard")
    p.add_argument("--out", help="write result JSON here")
    p.add_argument("--json", action="store_true", help="also print the result JSON")
    p.add_argument("--csv", help="write the per-sweep trace as CSV")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("verify", help="compare emitted circuits with exp(-itH)")
    p.add_argument("--result", required=True)
    p.add_argument("-t", default="0.1,1,10", help="comma-separated times")
    p.add_argument("--factor", type=float, default=10.0, help="slack on residual * ||H||_F * t")
    p.add_argument("--compressed", action="store_true")
    p.add_argument("--force", action="store_true", help="accept unconverged results")
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("emit", help="write a circuit as QASM or JSON")
    p.add_argument("--result")
    p.add_argument("-t", type=float, default=1.0)
    p.add_argument("--compressed", action="store_true")
    p.add_argument("--state-prep", metavar="LABEL", help="emit the (I + P)/2^n preparation circuit instead")
    p.add_argument("--many-ancillas", action="store_true", help="one ancilla per mixed qubit, no resets")
    p.add_argument("--no-barriers", action="store_true")
    p.add_argument("--force", action="store_true")
    p.add_argument("--format", choices=["qasm", "json"], default="qasm")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("bench", help="cost-call comparison of the two pipelines")
    _add_model_args(p)
    _add_structure_args(p)
    _add_optimizer_args(p)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--json", action="store_true")
    p.add_argument("--csv")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RedCarDError, ValueError, OSError, KeyError) as exc:
        print(f"redcard {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_STAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
