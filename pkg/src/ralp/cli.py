"""Command-line front end: interleaver construction, encoding, decoding,
bound tables, Monte Carlo runs, girth checks, and witness extraction.

Exit codes: 0 success, 1 domain error (bad parameters, malformed files),
2 usage error (unknown flags, missing arguments).
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import bounds as bounds_mod
from .auxgraph import Hyperpromenade, build_aux_graph, extract_witness, \
    validate_hyperpromenade
from .channels import llr_vector, LlrVector
from .decoder import RalpDecoder
from .encoder import DegreeDistribution, encode
from .interleaver import (
    build_matching,
    girth as hypergraph_girth,
    interleaver_to_line,
    load_interleaver,
    matching_to_interleaver,
    random_interleaver,
    save_interleaver,
)
from .simulate import (
    ConfigError,
    append_results,
    parse_config,
    resolve_interleaver,
    results_csv_line,
    run_monte_carlo,
)


def _floor_log(n: int, q: int) -> int:
    e = 0
    while q ** (e + 1) <= n:
        e += 1
    return e


def cmd_build_interleaver(args) -> int:
    if args.degrees:
        degrees = [int(s) for s in args.degrees.split(",")]
        if args.policy == "paper_greedy":
            raise ValueError("paper_greedy supports regular codes only; "
                             "use --policy random for irregular degrees")
        il, meas = random_interleaver(degrees, np.random.default_rng(args.seed))
    elif args.policy == "paper_greedy":
        graph, meas = build_matching(args.q, args.k, policy="paper_greedy")
        il = matching_to_interleaver(graph)
    else:
        graph, meas = build_matching(args.q, args.k, policy="random",
                                     rng=np.random.default_rng(args.seed))
        il = matching_to_interleaver(graph)
    save_interleaver(il, meas, args.out)
    floor = _floor_log(il.n, max(il.degrees.degrees)) - 1
    print(f"wrote {args.out}: k={il.k} n={il.n} girth={meas} "
          f"(floor bound {floor})")
    return 0


def cmd_encode(args) -> int:
    cfg = parse_config(args.config)
    il, _ = resolve_interleaver(cfg)
    dd = DegreeDistribution(cfg.degrees)
    info = [int(c) for c in args.info.strip()]
    if any(b not in (0, 1) for b in info):
        raise ValueError("info must be a 0/1 string")
    cw = encode(info, dd, il)
    line = "".join(str(int(b)) for b in cw.transmitted())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(line + "\n")
    else:
        print(line)
    return 0


def cmd_decode(args) -> int:
    cfg = parse_config(args.config)
    il, _ = resolve_interleaver(cfg)
    dd = DegreeDistribution(cfg.degrees)
    with open(args.llrs) as fh:
        vals = [float(tok) for tok in fh.read().split()]
    dec = RalpDecoder(dd, il, integrality_tol=cfg.integrality_tol,
                      feasibility_tol=cfg.feasibility_tol)
    out = dec.decode(LlrVector(np.array(vals)))
    if out.outcome == "codeword":
        print("".join(str(int(b)) for b in out.info))
    else:
        print("error")
    return 0


def cmd_simulate(args) -> int:
    cfg = parse_config(args.config)
    if args.workers is not None:
        cfg.workers = args.workers
    est, il, il_girth = run_monte_carlo(cfg)
    line = results_csv_line(cfg, il_girth, est)
    append_results(args.out, [line])
    print(f"trials={est.trials_run} errors={est.errors} wer={est.wer:.3e} "
          f"ci=[{est.ci_lo:.3e},{est.ci_hi:.3e}] "
          f"solver_failures={est.solver_failures} "
          f"wall={est.wall_time:.1f}s -> {args.out}")
    if args.plot:
        from .plots import save_wer_plot
        save_wer_plot(args.out, args.plot)
        print(f"figure -> {args.plot}")
    return 0


def cmd_bounds(args) -> int:
    ns = ([int(s) for s in args.n_list.split(",")] if args.n_list
          else [args.n])
    reports = []
    for n in ns:
        if args.channel == "bsc":
            reports.append(bounds_mod.bsc_bound(args.q, n, args.param,
                                                args.epsilon))
        else:
            reports.append(bounds_mod.awgn_bound(args.q, n, args.param,
                                                 args.epsilon))
    lines = [bounds_mod.CSV_HEADER] + [rep.csv_row() for rep in reports]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    if args.plot:
        from .plots import save_bound_curves
        save_bound_curves(reports, args.plot)
        print(f"figure -> {args.plot}")
    return 0


def cmd_verify_girth(args) -> int:
    il, header_girth = load_interleaver(args.interleaver)
    meas = hypergraph_girth(interleaver_to_line(il))
    q_max = max(il.degrees.degrees)
    floor = _floor_log(il.n, q_max) - 1
    shown = meas if meas != math.inf else "inf"
    print(f"k={il.k} n={il.n} measured_girth={shown} header_girth={header_girth} "
          f"floor_bound={floor}")
    if meas != header_girth:
        print("warning: header girth does not match measurement")
    return 0


def _parse_psi(path) -> Hyperpromenade:
    atoms = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'sigma tau'")
            atoms.append((int(parts[0]), int(parts[1])))
    if not atoms:
        raise ValueError(f"{path}: no atom paths found")
    return Hyperpromenade(tuple(atoms))


def cmd_extract_witness(args) -> int:
    cfg = parse_config(args.config)
    il, il_girth = resolve_interleaver(cfg)
    dd = DegreeDistribution(cfg.degrees)
    channel = cfg.channel
    rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 0)))
    cw = encode(np.zeros(dd.k, dtype=np.int8), dd, il)
    received = channel.sample(cw.transmitted(), rng)
    theta = build_aux_graph(cw, llr_vector(channel, received), il)
    psi = _parse_psi(args.psi)
    res = validate_hyperpromenade(theta, psi)
    if not res.valid:
        raise ValueError(f"not a hyperpromenade: {res.reason}")
    if args.g is not None:
        g = args.g
    else:
        g = il_girth if il_girth != math.inf else 2
        g -= g % 2
    witness = extract_witness(theta, psi, g)
    text = witness.dump()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out} (cost={witness.cost})")
    else:
        sys.stdout.write(text)
    return 0


def cmd_report(args) -> int:
    from .plots import save_wer_plot
    save_wer_plot(args.results, args.out)
    print(f"figure -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ralp",
        description="Repeat-accumulate codes: LP decoding, high-girth "
                    "interleavers, error bounds, Monte Carlo simulation.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-interleaver", help="construct and save an interleaver")
    b.add_argument("--q", type=int, help="repetition degree (regular)")
    b.add_argument("--k", type=int, help="number of groups")
    b.add_argument("--degrees", help="comma-separated degrees (irregular, random policy)")
    b.add_argument("--policy", choices=("paper_greedy", "random"),
                   default="paper_greedy")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build_interleaver)

    e = sub.add_parser("encode", help="encode an info word")
    e.add_argument("--config", required=True)
    e.add_argument("--info", required=True, help="0/1 string of length k")
    e.add_argument("--out")
    e.set_defaults(func=cmd_encode)

    d = sub.add_parser("decode", help="decode a file of LLR values")
    d.add_argument("--config", required=True)
    d.add_argument("--llrs", required=True)
    d.set_defaults(func=cmd_decode)

    s = sub.add_parser("simulate", help="Monte Carlo WER estimation")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True, help="results CSV (appended)")
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--plot", help="also render a WER figure to this file")
    s.set_defaults(func=cmd_simulate)

    bo = sub.add_parser("bounds", help="evaluate the analytic bounds")
    bo.add_argument("--q", type=int, required=True)
    bo.add_argument("--n", type=int)
    bo.add_argument("--n-list", help="comma-separated ns (sweep)")
    bo.add_argument("--channel", choices=("bsc", "awgn"), required=True)
    bo.add_argument("--param", type=float, required=True,
                    help="p for bsc, sigma2 for awgn")
    bo.add_argument("--epsilon", type=float, default=0.0)
    bo.add_argument("--out", help="write CSV here instead of stdout")
    bo.add_argument("--plot", help="also render bound curves to this file")
    bo.set_defaults(func=cmd_bounds)

    v = sub.add_parser("verify-girth", help="measure the girth of an interleaver file")
    v.add_argument("--interleaver", required=True)
    v.set_defaults(func=cmd_verify_girth)

    w = sub.add_parser("extract-witness",
                       help="extract a short nonpositive witness from a hyperpromenade")
    w.add_argument("--config", required=True)
    w.add_argument("--psi", required=True,
                   help="file of 'sigma tau' atom lines (repeat for multiplicity)")
    w.add_argument("--g", type=int, default=None, help="even analysis girth")
    w.add_argument("--out")
    w.set_defaults(func=cmd_extract_witness)

    r = sub.add_parser("report", help="render figures from a results CSV")
    r.add_argument("--results", required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_report)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n", None) is None and getattr(args, "n_list", None) is None \
            and args.command == "bounds":
        parser.error("bounds needs --n or --n-list")
    try:
        return args.func(args)
    except (ValueError, ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
