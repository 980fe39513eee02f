"""``hyperbell`` command line.

Exit codes: 0 the command's contract holds, 1 a scientific check failed,
2 bad usage or input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import bellstates, circuits, distinguish, protocols, twocopy
from .constants import DEFAULT_RESTARTS, DEFAULT_SEED, SCHEMA

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def default_threads() -> int:
    env = os.environ.get("HYPERBELL_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"HYPERBELL_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise UsageError("HYPERBELL_THREADS must be positive")
        return n
    return os.cpu_count() or 1


def _envelope(command: str, body: dict, provenance: dict | None = None, metadata: bool = True) -> dict:
    out = {"schema": SCHEMA, "command": command}
    if provenance is not None:
        prov = dict(provenance)
        prov["config_hash"] = hashlib.sha256(json.dumps(prov, sort_keys=True).encode()).hexdigest()[:16]
        out["provenance"] = prov
    out.update(body)
    if metadata:
        out["metadata"] = {"created": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    return out


def _emit(args, doc: dict, text: str | None = None) -> None:
    """Write JSON to ``--json`` if given; print text (or JSON) to stdout."""
    if not getattr(args, "metadata", True):
        doc.pop("metadata", None)
    payload = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if getattr(args, "json", None):
        Path(args.json).write_text(payload)
    if getattr(args, "format", "text") == "json":
        sys.stdout.write(payload)
    elif text is not None:
        print(text)


def _load_partition(path) -> circuits.Partition:
    try:
        return circuits.Partition.from_json(json.loads(Path(path).read_text()))
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot read partition file {path}: {exc}") from None


def _load_circuit(path) -> circuits.CircuitConfig:
    try:
        cfg = circuits.CircuitConfig.load(path)
        circuits.validate(cfg)
    except OSError as exc:
        raise UsageError(f"cannot read circuit file {path}: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"malformed circuit file {path}: {exc}") from None
    return cfg


# commands ------------------------------------------------------------------------------------


def cmd_tables(args) -> int:
    goldens = [
        _load_partition(args.table1) if args.table1 else circuits.golden_table(1),
        _load_partition(args.table2) if args.table2 else circuits.golden_table(2),
    ]
    configs = [circuits.kw_reference_config(), circuits.modified_reference_config()]
    ok = True
    body, texts = {"tables": []}, []
    for n, (cfg, gold) in enumerate(zip(configs, goldens), start=1):
        part = circuits.partition_states(cfg)
        part = part.named(circuits.class_names(part, gold, prime="'" if n == 2 else ""))
        match = part.member_sets() == gold.member_sets() and part.disjoint
        strings = sum(
            1 for c in gold.classes
            if any(p.members == c.members and p.signatures == c.signatures for p in part.classes)
        )
        ok &= match
        doc = part.to_json()
        doc.pop("schema")
        body["tables"].append({"table": n, "circuit": cfg.name, "matches_golden": match, "signature_strings_matching": strings, **doc})
        texts.append(part.to_text(f"Table {n} ({cfg.name}): {'match' if match else 'MISMATCH'}; "
                                  f"signature strings equal for {strings}/{len(gold.classes)} classes"))
    kw = configs[0]
    part1 = circuits.partition_states(kw)
    class_sigs = set().union(*(c.signatures for c in part1.classes))
    starred = {}
    for pol in ("Psi+", "Psi-"):
        sup = circuits.signature_support(bellstates.starred_state(pol), kw)
        starred[pol] = {"signatures": sorted(map(list, sup)), "disjoint_from_classes": not sup & class_sigs}
        ok &= not sup & class_sigs
    body["starred"] = starred
    body["ok"] = bool(ok)
    texts.append("Starred states: " + ", ".join(
        f"{p} support {'disjoint from' if v['disjoint_from_classes'] else 'OVERLAPS'} classes 1-7" for p, v in starred.items()
    ))
    _emit(args, _envelope("tables", body, metadata=args.metadata), "\n\n".join(texts))
    return OK if ok else FAIL


def cmd_partition(args) -> int:
    cfg = _load_circuit(args.circuit)
    part = circuits.partition_states(cfg)
    _emit(args, _envelope("partition", part.to_json(), metadata=args.metadata), part.to_text(cfg.name or args.circuit))
    return OK


def _progress(done, total):
    if done == total or done % 256 == 0:
        print(f"  {done}/{total} sets judged", file=sys.stderr, flush=True)


def cmd_sweep(args) -> int:
    opts = distinguish.FeasibilityOptions(restarts=args.restarts, seed=args.seed, max_iter=args.max_iter)
    if args.subset:
        try:
            members = bellstates.parse_labels(args.subset)
            rep = distinguish.feasibility(members, opts)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        prov = {"seed": opts.seed, "restarts": opts.restarts, "max_iter": opts.max_iter,
                "feasible_below": opts.feasible_below, "infeasible_above": opts.infeasible_above}
        doc = _envelope("sweep-subset", {"report": rep.to_json()}, prov, args.metadata)
        _emit(args, doc, f"{', '.join(map(str, rep.labels))}: {rep.verdict} (min residual {rep.min_residual:.6g}, "
                         f"{rep.restarts_used} restarts)")
        return OK
    if args.symmetry_reduce and args.limit:
        raise UsageError("--symmetry-reduce needs the full octet list; drop --limit")
    threads = args.threads or default_threads()
    report = distinguish.sweep_octets(
        opts, threads=threads, symmetry=args.symmetry_reduce,
        progress=None if args.quiet else _progress, limit=args.limit,
    )
    doc = report.to_json()
    meta = doc.pop("metadata")
    out = _envelope("sweep", doc, report.provenance(), args.metadata)
    if args.metadata:
        out["metadata"].update(meta)
    if args.out:
        Path(args.out).write_text(json.dumps(out, indent=1) + "\n")
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    s = report.summary()
    lines = [
        f"octets: {s['octets']}  solved: {s['solved']}  counts: {s['counts']}",
        f"smallest minimal residual: {s['min_of_min_residuals']:.6g}  largest: {s['max_of_min_residuals']:.6g}",
        f"wall time: {report.wall_time:.1f} s on {threads} worker(s)",
    ]
    if report.flagged:
        lines.append("!!! sets NOT judged infeasible (would contradict the 7-class optimum):")
        lines += [f"!!!   rank {e.rank}: {e.verdict}, residual {e.min_residual:.3g}, "
                  f"{[str(bellstates.BellLabel.from_index(i)) for i in e.members]}" for e in report.flagged]
    if args.format == "json":
        sys.stdout.write(json.dumps(out if args.metadata else {k: v for k, v in out.items() if k != "metadata"}, indent=1) + "\n")
    else:
        print("\n".join(lines))
    return OK if report.all_infeasible else FAIL


def cmd_calibrate(args) -> int:
    target = _load_partition(args.target_file) if args.target_file else circuits.golden_table(args.target)
    spaces = {"default": [circuits.SearchSpace.default()], "widened": [circuits.SearchSpace.widened()],
              "auto": [circuits.SearchSpace.default(), circuits.SearchSpace.widened()]}[args.space]
    hits, used, t0 = [], None, time.perf_counter()
    for space in spaces:
        hits = circuits.calibrate(target, space, limit=args.limit)
        used = space.name
        if hits:
            break
    elapsed = time.perf_counter() - t0
    body = {"space": used, "hits": len(hits), "configs": [h.to_json() for h in hits[: args.keep]]}
    if hits and args.out:
        hits[0].dump(args.out)
    _emit(args, _envelope("calibrate", body, {"space": used, "limit": args.limit}, args.metadata),
          f"{len(hits)} matching circuit(s) in the {used} space ({elapsed:.1f} s)")
    return OK if hits else FAIL


def cmd_twocopy(args) -> int:
    res = twocopy.run_trials(args.trials, args.seed)
    analyzer = twocopy.TwoCopyAnalyzer()
    example = str(analyzer.joint.lookup("1", "2'"))
    res["example_1_2prime"] = example
    ok = res["correct"] == res["trials"] and example == "Phi-*phi-"
    prov = {"seed": args.seed, "trials_per_label": args.trials}
    _emit(args, _envelope("twocopy", res, prov, args.metadata),
          f"identified {res['correct']}/{res['trials']} correctly; (1, 2') -> {example}")
    return OK if ok else FAIL


def cmd_dense(args) -> int:
    book = protocols.build_codebook()
    rng = np.random.default_rng(args.seed)
    errors = sum(
        protocols.dense_roundtrip(m, rng, book) != m for m in range(len(book.entries)) for _ in range(args.trials)
    )
    cross = protocols.efficiency_crossover()
    body = {"codebook": book.to_json(), "trials": args.trials * len(book.entries), "errors": errors,
            "capacity_bits": round(book.capacity_bits, 4), "crossover": cross}
    lines = [f"message {e.message}: {e.op.name} on photon {e.op.photon} -> {e.label} (class {e.class_name})" for e in book.entries]
    lines += [
        f"decoding errors: {errors}/{args.trials * len(book.entries)}",
        f"capacity: log2 7 = {book.capacity_bits:.4f} bits",
        f"efficiency threshold, outcome count {cross['class_count_threshold']['formula']} = {cross['class_count_threshold']['value']:.4f}",
        f"efficiency threshold, bits per attempt {cross['bit_ratio_threshold']['formula']} = {cross['bit_ratio_threshold']['value']:.4f}",
    ]
    _emit(args, _envelope("dense", body, {"seed": args.seed, "trials_per_message": args.trials}, args.metadata), "\n".join(lines))
    return OK if errors == 0 else FAIL


def cmd_fingerprint(args) -> int:
    scheme = protocols.fingerprint_scheme()
    exact = protocols.fingerprint_matrix(scheme)
    rng = np.random.default_rng(args.seed)
    n = len(scheme.alice.entries)
    wrong = 0
    for a in range(n):
        for b in range(n):
            for _ in range(args.trials):
                verdict = protocols.fingerprint_run(a, b, rng, scheme)
                wrong += verdict != ("equal" if a == b else "different")
    diag_ok = bool(np.allclose(np.diag(exact), 1.0, atol=1e-12))
    off = exact[~np.eye(n, dtype=bool)]
    perfect = bool(diag_ok and np.all(off < 1e-12))
    body = {"equal_probability": exact.tolist(), "diagonal_certain": diag_ok,
            "off_diagonal_max": float(off.max()), "perfect": perfect,
            "bob_ops": [op.name for op in scheme.bob_ops], "alice_ops": [e.op.name for e in scheme.alice.entries],
            "monte_carlo_wrong": wrong, "trials": args.trials * n * n}
    if args.csv:
        Path(args.csv).write_text("\n".join(",".join(f"{x:.12g}" for x in row) for row in exact) + "\n")
    text = "P(verdict equal) for message pairs (rows Alice, columns Bob):\n" + "\n".join(
        " ".join(f"{x:5.3f}" for x in row) for row in exact
    ) + f"\ndiagonal certain: {diag_ok}; every unequal pair always rejected: {perfect}; Monte Carlo wrong verdicts: {wrong}"
    _emit(args, _envelope("fingerprint", body, {"seed": args.seed, "trials_per_pair": args.trials}, args.metadata), text)
    return OK if diag_ok else FAIL


def cmd_teleport(args) -> int:
    tp = protocols.Teleporter()
    rng = np.random.default_rng(args.seed)
    successes, worst = 0, 1.0
    for _ in range(args.trials):
        out = tp.teleport(*protocols.random_qubit(rng), rng)
        if out.success:
            successes += 1
            worst = min(worst, out.fidelity)
    freq = successes / args.trials if args.trials else 0.0
    exact = tp.table.success_probability
    ok = abs(exact - 0.5) < 1e-9 and worst >= 1 - 1e-9 and (args.trials < 1000 or 0.48 <= freq <= 0.52)
    body = {"trials": args.trials, "successes": successes, "frequency": freq, "exact_success_probability": exact,
            "min_fidelity": worst, "success_branches": len(tp.table.corrections), "corrections": tp.table.to_json()}
    _emit(args, _envelope("teleport", body, {"seed": args.seed}, args.metadata),
          f"success {successes}/{args.trials} = {freq:.4f} (exact {exact:.12f}); worst fidelity {worst:.12f}")
    return OK if ok else FAIL


def cmd_bounds(args) -> int:
    try:
        if args.dims:
            dims = [int(d) for d in args.dims.split(",")]
            val = distinguish.general_bound(dims)
            _emit(args, _envelope("bounds", {"dims": dims, "bound": val}, metadata=args.metadata), f"2 * prod{tuple(dims)} = {val}")
            return OK
        bound = distinguish.upper_bound(args.n)
        ratio = distinguish.ratio(args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    body = {"n": args.n, "upper_bound": bound, "ratio": str(ratio), "conjectured_optimum": bound - 1}
    lines = [f"n = {args.n}: at most {bound} classes; ratio to 4^n = {ratio}; conjectured optimum {bound - 1}"]
    ok = True
    if args.n == 1:
        rep = distinguish.polarization_only_analysis()
        body["validation"] = rep.to_json()
        lines.append(f"polarization only: four-state set {rep.verdict}; analyzer classes {rep.classes}")
        ok = rep.ok
    if args.n == 2:
        part = circuits.partition_states(circuits.kw_reference_config())
        body["achieved"] = len(part.classes)
        lines.append(f"achieved by the KW analyzer: {len(part.classes)} classes (optimum 7)")
        ok = len(part.classes) == 7
    _emit(args, _envelope("bounds", body, metadata=args.metadata), "\n".join(lines))
    return OK if ok else FAIL


def cmd_worked(args) -> int:
    rep = distinguish.worked_example_check()
    lines = [f"constraint span rank: {rep.span_rank}"]
    lines += [f"  {c['kind']:8s} {c['modes']}: implied (distance {c['distance']:.1e})" for c in rep.conditions]
    lines.append(f"components forced to zero: {list(rep.forced_zero)} -> contradiction: {rep.contradiction}")
    lines.append(f"numerical verdict: {rep.feasibility.verdict} (min residual {rep.feasibility.min_residual:.6g})")
    _emit(args, _envelope("worked", rep.to_json(), metadata=args.metadata), "\n".join(lines))
    return OK if rep.ok and rep.feasibility.verdict == "infeasible" else FAIL


# parser --------------------------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        n = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _nonneg(text: str) -> int:
    try:
        n = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--json", metavar="PATH", help="also write the JSON report here")
    common.add_argument("--no-metadata", dest="metadata", action="store_false",
                        help="omit the timestamp block so reruns are byte-identical")
    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=_nonneg, default=DEFAULT_SEED)

    p = argparse.ArgumentParser(prog="hyperbell", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    s = sub.add_parser("tables", parents=[common], help="reference partitions vs the reference tables")
    s.add_argument("--table1", metavar="PATH", help="golden for the KW analyzer")
    s.add_argument("--table2", metavar="PATH", help="golden for the modified analyzer")
    s.set_defaults(func=cmd_tables)

    s = sub.add_parser("partition", parents=[common], help="partition the 16 states with a circuit file")
    s.add_argument("--circuit", required=True, metavar="PATH")
    s.set_defaults(func=cmd_partition)

    s = sub.add_parser("sweep", parents=[common, seeded], help="judge all 12870 octets")
    s.add_argument("--restarts", type=_positive, default=DEFAULT_RESTARTS)
    s.add_argument("--max-iter", type=_positive, default=distinguish.DEFAULT_MAX_ITER)
    s.add_argument("--threads", type=_positive, default=None)
    s.add_argument("--out", metavar="PATH", help="full JSON report")
    s.add_argument("--csv", metavar="PATH", help="CSV summary, one row per octet")
    s.add_argument("--symmetry-reduce", action="store_true")
    s.add_argument("--subset", metavar="LABELS", help='judge one set, e.g. "Phi+*phi+,Psi-*psi-"')
    s.add_argument("--limit", type=_positive, default=None, help="only the first N ranks (smoke test)")
    s.add_argument("--quiet", action="store_true")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("calibrate", parents=[common], help="search circuits reproducing a table")
    s.add_argument("--target", type=int, choices=(1, 2), default=2)
    s.add_argument("--target-file", metavar="PATH")
    s.add_argument("--space", choices=("default", "widened", "auto"), default="auto")
    s.add_argument("--limit", type=_positive, default=None)
    s.add_argument("--keep", type=_positive, default=5, help="configs listed in the report")
    s.add_argument("--out", metavar="PATH", help="write the first match as a circuit file")
    s.set_defaults(func=cmd_calibrate)

    s = sub.add_parser("twocopy", parents=[common, seeded], help="two-copy identification")
    s.add_argument("--trials", type=_positive, default=100, help="per label")
    s.set_defaults(func=cmd_twocopy)

    s = sub.add_parser("dense", parents=[common, seeded], help="superdense coding")
    s.add_argument("--trials", type=_positive, default=100, help="per message")
    s.set_defaults(func=cmd_dense)

    s = sub.add_parser("fingerprint", parents=[common, seeded], help="quantum fingerprinting")
    s.add_argument("--trials", type=_nonneg, default=20, help="per message pair")
    s.add_argument("--csv", metavar="PATH", help="exact 7x7 matrix")
    s.set_defaults(func=cmd_fingerprint)

    s = sub.add_parser("teleport", parents=[common, seeded], help="teleportation through the KW analyzer")
    s.add_argument("--trials", type=_positive, default=10000)
    s.set_defaults(func=cmd_teleport)

    s = sub.add_parser("bounds", parents=[common], help="class-count bounds")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--dims", metavar="D1,D2,...")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("worked", parents=[common], help="analytic structure of the worked octet")
    s.set_defaults(func=cmd_worked)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors as exit 2
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hyperbell: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
