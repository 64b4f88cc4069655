"""Command line front end.

Exit codes: 0 success, 1 domain failure (infeasible, verification red,
undecodable), 2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import sys

from . import graphs, io, spectra, synth, verify
from .graphs import Finite, Infinite, Unknown


class DomainError(Exception):
    pass


def _load_graph(path):
    with open(path) as fh:
        return io.parse_graph_file(fh.read())


def _load_encoder(path):
    with open(path) as fh:
        return io.parse_encoder_file(fh.read())


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _maybe_power(g, t):
    return graphs.power(g, t) if t and t > 1 else g


def cmd_info(args):
    g = _load_graph(args.file)
    print("states: %d" % len(g.states))
    print("edges: %d" % len(g.edges))
    print("deterministic: %s" % ("yes" if graphs.is_deterministic(g)
                                 else "no"))
    comps = graphs.irreducible_components(g)
    print("irreducible components: %d" % len(comps))
    if len(comps) == 1 and g.edges:
        print("period: %d" % graphs.period(g))
    mem = graphs.memory(g)
    if isinstance(mem, Finite):
        print("memory: %d" % mem.value)
    elif isinstance(mem, Infinite):
        print("memory: infinite")
    else:
        print("memory: unknown (> %d)" % mem.bound)
    print("capacity: %.6f" % spectra.capacity(g))


def cmd_power(args):
    g = _load_graph(args.file)
    _emit(io.serialize_graph(graphs.power(g, args.t)), args.output)


def cmd_franaszek(args):
    g = _maybe_power(_load_graph(args.file), args.t)
    a0, a1, _ = graphs.adjacency_pair(g)
    import numpy as np
    xi = np.full(len(g.states), args.cap, dtype=np.int64)
    x = spectra.franaszek_joint(a0, a1, args.n0, args.n1, xi)
    if not x.any():
        print("none <= %d" % args.cap)
        raise DomainError("no nonzero vector within the cap")
    print(" ".join(str(int(v)) for v in x))


def cmd_region(args):
    g = _load_graph(args.file)
    points = spectra.rate_region(g, args.t, xi_cap=args.cap)
    lines = ["n0,n1,witness"]
    for p in points:
        lines.append('%d,%d,"%s"'
                     % (p.n0, p.n1, " ".join(str(v) for v in p.witness)))
    _emit("\n".join(lines) + "\n", args.output)


def _synthesize(g, method, n0, n1, cap):
    a0, a1, _ = graphs.adjacency_pair(g)
    if method == "det":
        got = spectra.joint_ae_exists(a0, a1, n0, n1, xi_cap=1)
        if got is None:
            raise DomainError("no 0-1 joint approximate eigenvector")
        return synth.extract_deterministic(g, got.entries, n0, n1)
    if method == "split":
        try:
            _, got = spectra.min_infnorm_ae(a0, a1, n0, n1, xi_cap=cap)
        except spectra.NotFoundWithin as exc:
            raise DomainError(str(exc))
        e0 = synth.split_one_round(graphs.parity_subgraph(g, 0),
                                  got.entries, n0)
        e1 = synth.split_one_round(graphs.parity_subgraph(g, 1),
                                  got.entries, n1)
        return synth.merge_split_pair(e0, e1, got.entries)
    if method == "stether":
        try:
            _, got = spectra.min_infnorm_ae(a0, a1, n0, n1, xi_cap=cap)
        except spectra.NotFoundWithin as exc:
            raise DomainError(str(exc))
        return synth.stether(g, got.entries, n0, n1)
    if method == "punctured":
        try:
            _, got = spectra.min_infnorm_ae(a0, a1, n0 + 1, n1 + 1,
                                            xi_cap=cap)
        except spectra.NotFoundWithin as exc:
            raise DomainError(str(exc))
        return synth.stether_punctured(g, got.entries, n0, n1)
    raise DomainError("unknown method %r" % method)


def cmd_synth(args):
    g = _maybe_power(_load_graph(args.file), args.t)
    try:
        enc = _synthesize(g, args.method, args.n0, args.n1, args.cap)
    except (synth.InfeasibleVector, synth.SplitInfeasible,
            synth.InsufficientWeight) as exc:
        raise DomainError(str(exc))
    _emit(io.serialize_encoder(enc), args.output)


def cmd_verify(args):
    enc = _load_encoder(args.encoder)
    g = _maybe_power(_load_graph(args.against), args.t)
    report = verify.check_encoder(enc, g, args.n0, args.n1, cap=args.cap)
    print(report)
    if not report.ok:
        raise DomainError("verification failed")


def cmd_encode(args):
    enc = _load_encoder(args.encoder)
    tags = sys.stdin.read().split()
    try:
        word, end, trace = verify.encode_stream(
            enc, tags, args.start, policy=args.policy, p=args.p)
    except (verify.UnknownTag, synth.ArityMismatch, ValueError) as exc:
        raise DomainError(str(exc))
    print(" ".join(word))
    print("end: %s" % end, file=sys.stderr)
    print("rds: %s" % " ".join(str(v) for v in trace), file=sys.stderr)


def cmd_decode(args):
    enc = _load_encoder(args.encoder)
    word = sys.stdin.read().split()
    try:
        decoded = verify.decode_stream(enc, word, args.start, p=args.p)
    except (verify.NotDecodable, verify.PreconditionFailed) as exc:
        raise DomainError(str(exc))
    parts = []
    for d in decoded:
        tag = d.tag if isinstance(d.tag, str) else "%d/%d" % d.tag
        parts.append(tag + ("?" if d.provisional else ""))
    print(" ".join(parts))


def cmd_export_dot(args):
    g = _load_graph(args.file)
    _emit(io.export_dot(g), args.output)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="bimodal",
        description="parity-split constrained encoder toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(fn=fn)
        return p

    p = add("info", cmd_info, help="summarize a graph file")
    p.add_argument("file")

    p = add("power", cmd_power, help="write the t-th graph power")
    p.add_argument("file")
    p.add_argument("-t", type=int, required=True)
    p.add_argument("-o", "--output")

    p = add("franaszek", cmd_franaszek,
            help="largest joint vector under a cap")
    p.add_argument("file")
    p.add_argument("--n0", type=int, required=True)
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--cap", type=int, default=64)
    p.add_argument("-t", type=int, default=1)

    p = add("region", cmd_region, help="achievable degree pairs as CSV")
    p.add_argument("file")
    p.add_argument("-t", type=int, required=True)
    p.add_argument("--cap", type=int, default=64)
    p.add_argument("-o", "--output")

    p = add("synth", cmd_synth, help="construct an encoder")
    p.add_argument("file")
    p.add_argument("--method", required=True,
                   choices=["det", "split", "stether", "punctured"])
    p.add_argument("--n0", type=int, required=True)
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--cap", type=int, default=64)
    p.add_argument("-t", type=int, default=1)
    p.add_argument("-o", "--output")

    p = add("verify", cmd_verify, help="check an encoder against a graph")
    p.add_argument("encoder")
    p.add_argument("--against", required=True)
    p.add_argument("--n0", type=int, required=True)
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--cap", type=int, default=32)
    p.add_argument("-t", type=int, default=1)

    p = add("encode", cmd_encode, help="encode tag blocks from stdin")
    p.add_argument("encoder")
    p.add_argument("--start", required=True)
    p.add_argument("--policy", default="as-tagged",
                   choices=["as-tagged", "fixed-parity", "rds-min"])
    p.add_argument("-p", type=int, default=None)

    p = add("decode", cmd_decode, help="decode a word from stdin")
    p.add_argument("encoder")
    p.add_argument("--start", required=True)
    p.add_argument("-p", type=int, default=None)

    p = add("export-dot", cmd_export_dot, help="Graphviz output")
    p.add_argument("file")
    p.add_argument("-o", "--output")

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.fn(args)
    except (io.ParseError, graphs.ValidationError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except DomainError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
