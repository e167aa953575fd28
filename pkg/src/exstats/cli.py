"""Command line: exstats {compute,order,simplify,reconstruct,draw,impose}.

Exit codes: 0 success, 2 bad input, 3 resource limit reached.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .abelian import FiniteAbelianGroup, parse_element
from .complex import builtin
from .expr import (Expression, ParseError, expand_theta, format_word, norm1, parse_expression,
                   parse_process)
from .linalg import ResourceLimitError
from .model import ExcitationModel, from_builtin
from .modelfile import format_report, load_model, parse_generators, write_expression
from .proctools import emit_dot, reconstruct_process, simplify_randomly
from .statistics import (compute_Einv_basis, compute_T, group_string, identity_generators, impose,
                         modified_order, order_in)

EXIT_INPUT = 2
EXIT_RESOURCE = 3


class InputError(Exception):
    pass


def add_model_args(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", metavar="NAME[:N]", help="builtin model, e.g. triangle, points:2, boundary-simplex:3")
    src.add_argument("--model", metavar="FILE", help="model file")
    p.add_argument("--group", default="Z2", help="fusion group for builtins, e.g. Z2xZ2 (default Z2)")
    p.add_argument("--p", type=int, default=None, help="excitation dimension (builtin default if omitted)")
    p.add_argument("--generators", default=None, help="generating set for builtins, e.g. '1 | 3'")


def load(args) -> ExcitationModel:
    if args.model:
        return load_model(args.model)
    group = FiniteAbelianGroup.parse(args.group)
    b = builtin(args.builtin)
    if not b.desk_scale:
        print(f"warning: {b.name}: {b.note}", file=sys.stderr)
    return from_builtin(b, group, args.p, parse_generators(args.generators, group))


def model_fields(m: ExcitationModel, args) -> list[tuple[str, object]]:
    src = f"model {args.model}" if args.model else f"builtin {args.builtin} group {args.group}" + \
        (f" p {args.p}" if args.p is not None else "")
    return [("source", src), ("operators", m.op_count), ("configurations", m.config_count)]


def add_expr_args(p: argparse.ArgumentParser, allow_process: bool = True):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--expr", metavar="FILE", help="expression file (lines '<coeff> <label> @ [residues]')")
    if allow_process:
        g.add_argument("--process", metavar="WORD", help="process word, expanded as θ(word, --at)")
    g.add_argument("--generator", type=int, metavar="K", help="K-th generator of T (1-based; default 1)")
    if allow_process:
        p.add_argument("--at", default=None, metavar="[r1,...]", help="starting configuration (default 0)")


def read_expression(m: ExcitationModel, args, stats=None) -> tuple[Expression, str]:
    if getattr(args, "expr", None):
        return parse_expression(m, Path(args.expr).read_text(encoding="utf-8")), args.expr
    if getattr(args, "process", None):
        a = 0
        if args.at:
            a = m.config_index(parse_element(args.at))
        e, _ = expand_theta(m, parse_process(args.process, m), a)
        return e, f"process {args.process}"
    k = args.generator or 1
    stats = stats or compute_T(m)
    if not 1 <= k <= len(stats.generators):
        raise InputError(f"T has {len(stats.generators)} generators; --generator {k} is out of range")
    return stats.generators[k - 1], f"generator {k}"


def cmd_compute(args) -> int:
    m = load(args)
    t0 = time.perf_counter()
    r = compute_T(m)
    elapsed = time.perf_counter() - t0
    fields = model_fields(m, args) + [
        ("dim_E", r.dims[0]), ("identity_generators", r.dims[1]), ("dim_Einv", r.dims[2]),
        ("T", group_string(r.invariant_factors, r.free_rank)),
        ("T_f", group_string(r.tf_factors)),
        ("seconds", f"{elapsed:.2f}"),
    ]
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for i, (lam, g) in enumerate(zip(r.invariant_factors, r.generators), 1):
            path = out / f"generator_{i}.txt"
            write_expression(path, m, g, f"generator {i} of T, order {lam}, norm {norm1(g)}")
            fields.append((f"generator_{i}", f"{path.name} order {lam}"))
        (out / "report.txt").write_text(format_report(fields), encoding="utf-8")
    sys.stdout.write(format_report(fields))
    print(f"T = {group_string(r.invariant_factors, r.free_rank)}")
    return 0


def cmd_order(args) -> int:
    m = load(args)
    e, _ = read_expression(m, args)
    print(order_in(m, identity_generators(m), e, compute_Einv_basis(m)))
    return 0


def cmd_simplify(args) -> int:
    m = load(args)
    lat = identity_generators(m)
    stats = compute_T(m, lat) if not args.expr else None
    e, what = read_expression(m, args, stats)
    res = simplify_randomly(lat, e, args.tries, args.restarts, args.seed, args.plateau)
    fields = model_fields(m, args) + [("input", what), ("input_norm", norm1(e)), ("best_norm", res.norm),
                                       ("best_restart", res.restart), ("tries", args.tries),
                                       ("restarts", args.restarts), ("seed", args.seed), ("plateau", args.plateau)]
    if args.out:
        out = Path(args.out)
        write_expression(out, m, res.expression, f"simplified from {what}, norm {res.norm}")
        from .plotting import plot_norm_trace  # matplotlib is slow to import
        png = plot_norm_trace(res.trace, out.with_suffix(".png"), res.restart_norms)
        fields += [("output", out), ("plot", png)]
    sys.stdout.write(format_report(fields))
    return 0


def cmd_reconstruct(args) -> int:
    m = load(args)
    e, _ = read_expression(m, args)
    w = reconstruct_process(m, e)
    text = format_word(m, w)
    print(f"# length {len(w)}")
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    return 0


def cmd_draw(args) -> int:
    m = load(args)
    e, what = read_expression(m, args)
    from .plotting import plot_expression_graph
    dot = emit_dot(m, e)
    out = Path(args.out)
    out.write_text(dot, encoding="utf-8")
    png = plot_expression_graph(m, e, out.with_suffix(".png"), what)
    sys.stdout.write(format_report(model_fields(m, args) + [("input", what), ("dot", out), ("plot", png)]))
    return 0


def cmd_impose(args) -> int:
    m = load(args)
    lat = identity_generators(m)
    r = compute_T(m, lat)
    words = [parse_process(w, m) for w in args.process]
    ext = impose(m, words, lat)
    fields = model_fields(m, args) + [("T", group_string(r.invariant_factors, r.free_rank))]
    fields += [(f"imposed_{i}", w) for i, w in enumerate(args.process, 1)]
    for i, g in enumerate(r.generators, 1):
        fields.append((f"generator_{i}", f"order {order_in(m, lat, g, r.einv)} "
                                         f"modified_order {modified_order(m, ext, g, r.einv)}"))
    if args.expr:
        e = parse_expression(m, Path(args.expr).read_text(encoding="utf-8"))
        fields.append(("expression", f"order {order_in(m, lat, e, r.einv)} "
                                     f"modified_order {modified_order(m, ext, e, r.einv)}"))
    sys.stdout.write(format_report(fields))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="exstats", description="Statistics of topological excitations in finite models.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="statistics group T and T_f")
    add_model_args(p)
    p.add_argument("--out", metavar="DIR", help="write report.txt and generator files here")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("order", help="order code of an expression: 0 outside E_inv, 1 identity, n otherwise")
    add_model_args(p)
    add_expr_args(p)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("simplify", help="random norm descent modulo locality identities")
    add_model_args(p)
    add_expr_args(p, allow_process=False)
    p.add_argument("--tries", type=int, default=10_000)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plateau", type=float, default=0.0, help="probability of taking a norm-neutral move")
    p.add_argument("--out", metavar="FILE", help="write the best expression here (plot goes beside it)")
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("reconstruct", help="a process word whose expansion is the expression")
    add_model_args(p)
    add_expr_args(p, allow_process=False)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("draw", help="DOT graph of an expression on the configuration graph")
    add_model_args(p)
    add_expr_args(p)
    p.add_argument("--out", metavar="FILE", required=True, help="DOT output; a PNG is written beside it")
    p.set_defaults(func=cmd_draw)

    p = sub.add_parser("impose", help="orders after imposing processes as identities")
    add_model_args(p)
    p.add_argument("--process", action="append", required=True, metavar="WORD", help="repeatable")
    p.add_argument("--expr", metavar="FILE", help="also report this expression")
    p.set_defaults(func=cmd_impose)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"error: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ParseError, InputError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
