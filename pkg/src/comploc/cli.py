"""Command-line surface and the line-oriented text formats.

Compositions and branching programs round-trip through a canonical form:
supports sorted, outer keys sorted by their 0/1 string (inner 1 leftmost),
tables as lowercase zero-padded hex with the all-zero-input bit lowest.
Exit codes: 0 = pass, 1 = property violated / counterexample / infeasible
(with the witness printed), 2 = usage or sizing error.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from .boolfn import Domain, SizingError, named_function
from .branching import BranchingProgram, Layer, bp_to_composition, bp_truth_table
from .composition import (
    Composition,
    LocalFunction,
    OuterFunction,
    RestrictionError,
    UnmappedPatternError,
    pattern_string,
    query_profile,
    verify_against,
)
from .constructions import build_hw, build_maj, build_parity
from .depth3 import Depth3Circuit, composition_to_depth3, depth3_size
from .infoflow import (
    AnalysisPreconditionError,
    check_key_lemma,
    extract_bias_witness,
    info_report,
    validate_information_facts,
)
from .majreduce import InfeasibleReductionError, derive_partial_hw, split_variables
from .search import SearchBudget, exact_cc

BUILDERS = {"parity": build_parity, "hw": build_hw, "maj": build_maj}


class FormatError(ValueError):
    """Malformed composition or branching-program text."""


# ----------------------------------------------------------------------
# composition files
# ----------------------------------------------------------------------

def _table_hex(table: np.ndarray) -> str:
    bits = 0
    for y, v in enumerate(table):
        bits |= int(v) << y
    width = max(1, (len(table) + 3) // 4)
    return f"{bits:0{width}x}"


def _table_from_hex(text: str, size: int) -> np.ndarray:
    try:
        bits = int(text, 16)
    except ValueError:
        raise FormatError(f"bad table hex {text!r}") from None
    if bits >= (1 << size):
        raise FormatError(f"table hex {text!r} wider than {size} bits")
    return np.fromiter(((bits >> y) & 1 for y in range(size)), dtype=np.uint8, count=size)


def serialize_composition(c: Composition) -> str:
    lines = [f"COMPOSITION n={c.n} k={c.k} m={c.m} d={c.codomain_size}"]
    for j, g in enumerate(c.inners, start=1):
        vars_txt = ",".join(str(v) for v in g.support) if g.support else "-"
        lines.append(f"INNER {j} VARS {vars_txt} TABLE {_table_hex(g.table)}")
    entries = c.outer.entries
    lines.append(f"OUTER {len(entries)}")
    keyed = sorted((pattern_string(p, c.m), v) for p, v in entries.items())
    for key, value in keyed:
        lines.append(f"{key} -> {value}")
    return "\n".join(lines) + "\n"


def _header_fields(line: str, tag: str, names: tuple[str, ...]) -> dict[str, int]:
    parts = line.split()
    if not parts or parts[0] != tag:
        raise FormatError(f"expected {tag} header, got {line!r}")
    fields = {}
    for part in parts[1:]:
        if "=" not in part:
            raise FormatError(f"bad header field {part!r}")
        key, _, raw = part.partition("=")
        fields[key] = raw
    missing = [nm for nm in names if nm not in fields]
    if missing:
        raise FormatError(f"{tag} header missing fields {missing}")
    out = {}
    for nm in names:
        try:
            out[nm] = int(fields[nm])
        except ValueError:
            raise FormatError(f"{tag} header field {nm}={fields[nm]!r} not an integer") from None
    return out


def parse_composition(text: str) -> Composition:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty composition file")
    head = _header_fields(lines[0], "COMPOSITION", ("n", "k", "m", "d"))
    n, k, m, d = head["n"], head["k"], head["m"], head["d"]
    if len(lines) < 1 + m + 1:
        raise FormatError("truncated composition file")
    inners = []
    for j in range(1, m + 1):
        parts = lines[j].split()
        if (
            len(parts) != 6
            or parts[0] != "INNER"
            or parts[2] != "VARS"
            or parts[4] != "TABLE"
        ):
            raise FormatError(f"bad INNER line {lines[j]!r}")
        if parts[1] != str(j):
            raise FormatError(f"INNER lines out of order at {lines[j]!r}")
        support = () if parts[3] == "-" else tuple(int(v) for v in parts[3].split(","))
        table = _table_from_hex(parts[5], 1 << len(support))
        inners.append(LocalFunction(support, table))
    outer_line = lines[1 + m].split()
    if len(outer_line) != 2 or outer_line[0] != "OUTER":
        raise FormatError(f"bad OUTER line {lines[1 + m]!r}")
    count = int(outer_line[1])
    if len(lines) != 2 + m + count:
        raise FormatError(
            f"expected {count} outer entries, file has {len(lines) - 2 - m}"
        )
    entries = {}
    for ln in lines[2 + m :]:
        parts = ln.split()
        if len(parts) != 3 or parts[1] != "->":
            raise FormatError(f"bad outer entry {ln!r}")
        key, value = parts[0], parts[2]
        if len(key) != m or any(ch not in "01" for ch in key):
            raise FormatError(f"outer key {key!r} is not an {m}-bit 0/1 string")
        pattern = sum(int(ch) << j for j, ch in enumerate(key))
        if pattern in entries:
            raise FormatError(f"duplicate outer key {key!r}")
        entries[pattern] = int(value)
    try:
        return Composition(
            n=n,
            k=k,
            inners=tuple(inners),
            outer=OuterFunction(m=m, codomain_size=d, entries=entries),
        )
    except ValueError as exc:
        raise FormatError(str(exc)) from None


# ----------------------------------------------------------------------
# branching-program files
# ----------------------------------------------------------------------

def serialize_bp(bp: BranchingProgram) -> str:
    accept = ",".join(str(s) for s in sorted(bp.accept)) if bp.accept else "-"
    lines = [
        f"BP n={bp.n} w={bp.width} L={bp.length} start={bp.start} accept={accept}"
    ]
    for t, layer in enumerate(bp.layers, start=1):
        d0 = ",".join(str(s) for s in layer.delta0)
        d1 = ",".join(str(s) for s in layer.delta1)
        lines.append(f"LAYER {t} VAR {layer.var} D0 {d0} D1 {d1}")
    return "\n".join(lines) + "\n"


def parse_bp(text: str) -> BranchingProgram:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty branching-program file")
    parts = lines[0].split()
    if parts[0] != "BP":
        raise FormatError(f"expected BP header, got {lines[0]!r}")
    fields = dict(p.partition("=")[::2] for p in parts[1:])
    try:
        n = int(fields["n"])
        w = int(fields["w"])
        length = int(fields["L"])
        start = int(fields["start"])
        accept_txt = fields["accept"]
    except (KeyError, ValueError):
        raise FormatError(f"bad BP header {lines[0]!r}") from None
    accept = (
        frozenset()
        if accept_txt == "-"
        else frozenset(int(s) for s in accept_txt.split(","))
    )
    if len(lines) != 1 + length:
        raise FormatError(f"expected {length} layers, file has {len(lines) - 1}")
    layers = []
    for t, ln in enumerate(lines[1:], start=1):
        parts = ln.split()
        if (
            len(parts) != 8
            or parts[0] != "LAYER"
            or parts[2] != "VAR"
            or parts[4] != "D0"
            or parts[6] != "D1"
        ):
            raise FormatError(f"bad LAYER line {ln!r}")
        if parts[1] != str(t):
            raise FormatError(f"LAYER lines out of order at {ln!r}")
        delta0 = tuple(int(s) for s in parts[5].split(","))
        delta1 = tuple(int(s) for s in parts[7].split(","))
        layers.append(Layer(var=int(parts[3]), delta0=delta0, delta1=delta1))
    try:
        return BranchingProgram(
            n=n, width=w, layers=tuple(layers), start=start, accept=accept
        )
    except ValueError as exc:
        raise FormatError(str(exc)) from None


# ----------------------------------------------------------------------
# depth-3 circuit files (write-only)
# ----------------------------------------------------------------------

def serialize_depth3(circuit: Depth3Circuit) -> str:
    gate_count, fanin, top_fanin = depth3_size(circuit)
    lines = [
        f"DEPTH3 polarity={circuit.polarity} n={circuit.n} "
        f"bottom={len(circuit.bottom)} middle={len(circuit.middle)} "
        f"bottom_fanin={fanin}"
    ]
    for idx, clause in enumerate(circuit.bottom, start=1):
        lines.append(f"BOTTOM {idx} {','.join(str(lit) for lit in clause)}")
    for idx, mg in enumerate(circuit.middle, start=1):
        gates = ",".join(str(g + 1) for g in mg.bottom) if mg.bottom else "-"
        lits = ",".join(str(lit) for lit in mg.literals) if mg.literals else "-"
        lines.append(f"MIDDLE {idx} GATES {gates} LITS {lits}")
    top = ",".join(str(i + 1) for i in circuit.top) if circuit.top else "-"
    lines.append(f"TOP {top}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# subcommand helpers
# ----------------------------------------------------------------------

def _parse_band(raw: str | None, n: int) -> Domain:
    if raw is None:
        return Domain.full_cube(n)
    try:
        lo_txt, hi_txt = raw.split(":")
        lo, hi = int(lo_txt), int(hi_txt)
    except ValueError:
        raise SizingError(f"bad band {raw!r}, expected LO:HI") from None
    return Domain.weight_band(n, lo, hi)


def _read(path: str) -> str:
    with open(path, "r", encoding="ascii") as fh:
        return fh.read()


def _write(path: str | None, text: str, out) -> None:
    if path is None:
        out.write(text)
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)


def _cmd_construct(args, out) -> int:
    builder = BUILDERS[args.function]
    c = builder(args.n, args.k)
    _write(args.output, serialize_composition(c), out)
    profile = query_profile(c)
    out.write(
        f"constructed {args.function} n={args.n} k={args.k} m={c.m} "
        f"q_max={profile.q_max} overhead={profile.overhead}\n"
    )
    return 0


def _cmd_verify(args, out) -> int:
    c = parse_composition(_read(args.file))
    target = named_function(args.target, c.n)
    domain = _parse_band(args.band, c.n)
    cx = verify_against(c, target, domain)
    if cx is None:
        out.write(f"verified against {args.target} on {domain.size} inputs\n")
        return 0
    out.write(str(cx) + "\n")
    return 1


def _cmd_reduce_bp(args, out) -> int:
    bp = parse_bp(_read(args.file))
    c = bp_to_composition(bp, args.k)
    cx = verify_against(c, bp_truth_table(bp), Domain.full_cube(bp.n))
    if cx is not None:  # cannot happen; kept as a hard failure path
        out.write(str(cx) + "\n")
        return 1
    _write(args.output, serialize_composition(c), out)
    out.write(f"reduced BP (w={bp.width}, L={bp.length}) at k={args.k}: m={c.m}\n")
    return 0


def _cmd_to_depth3(args, out) -> int:
    c = parse_composition(_read(args.file))
    circuit = composition_to_depth3(c, args.polarity)
    gate_count, fanin, top_fanin = depth3_size(circuit)
    _write(args.output, serialize_depth3(circuit), out)
    budget = (1 << c.m) + c.m * (1 << c.k) + 1
    out.write(
        f"gates={gate_count} (budget {budget}) bottom_fanin={fanin} "
        f"top_fanin={top_fanin}\n"
    )
    return 0


def _cmd_info(args, out) -> int:
    c = parse_composition(_read(args.file))
    domain = _parse_band(args.band, c.n)
    report = info_report(c, domain)
    with open(args.csv, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["var", "q", "I", "Hcond", "escape"])
        for row in report.rows:
            writer.writerow(
                [
                    row.var,
                    row.q,
                    f"{row.mi:.12g}",
                    f"{row.h_cond:.12g}",
                    f"{float(row.escape):.12g}",
                ]
            )
        writer.writerow(
            [
                "total",
                sum(r.q for r in report.rows),
                f"{report.i_total:.12g}",
                f"{sum(r.h_cond for r in report.rows):.12g}",
                f"{float(max(r.escape for r in report.rows)):.12g}",
            ]
        )
    out.write(
        f"wrote {args.csv}: n={report.n} m={report.m} |D|={report.domain_size} "
        f"I_total={report.i_total:.6f}\n"
    )
    return 0


def _cmd_check_lemma(args, out) -> int:
    c = parse_composition(_read(args.file))
    target = named_function(args.target, c.n)
    domain = _parse_band(args.band, c.n)
    report = check_key_lemma(c, target, domain)
    for r in report.records:
        flag = "ok" if r.ok else "VIOLATED"
        out.write(
            f"var={r.var} q={r.q} escape={float(r.escape):.6f} "
            f"Hcond={r.h_cond:.6f} gap={r.gap:.6f} {flag}\n"
        )
    if report.ok:
        out.write(f"all {len(report.records)} variables pass (min gap {report.min_gap:.6f})\n")
        return 0
    out.write("gap bound violated\n")
    return 1


def _cmd_reduce_maj(args, out) -> int:
    c = parse_composition(_read(args.file))
    target = named_function("maj", c.n)
    cx = verify_against(c, target, Domain.full_cube(c.n))
    if cx is not None:
        out.write(f"input does not compute majority: {cx}\n")
        return 1
    split = split_variables(c, args.t)
    partial = derive_partial_hw(c, split)
    _write(args.output, serialize_composition(partial.composition), out)
    lo, hi = partial.band
    out.write(
        f"free={split.n_free} buffer={len(split.i_buffer)} control={split.t} "
        f"band={lo}:{hi} buffer_weight={partial.buffer_weight}\n"
    )
    return 0


def _cmd_witness(args, out) -> int:
    c = parse_composition(_read(args.file))
    target = named_function("hw", c.n)
    domain = _parse_band(args.band, c.n)
    w = extract_bias_witness(c, target, domain, args.var)
    inner_list = ",".join(str(j + 1) for j in w.nonquery_inners) or "-"
    v_bits = "".join(str((w.v >> b) & 1) for b in range(len(w.nonquery_inners))) or "-"
    out.write(
        f"var={w.var} nonquery_inners={inner_list} v={v_bits} w_star={w.w_star} "
        f"p_cond={w.p_cond} mass={w.mass} |W_v|={w.w_v_size}\n"
    )
    return 0


def _cmd_search(args, out) -> int:
    target = named_function(args.target, args.n)
    budget = SearchBudget(m_max=args.m_max) if args.m_max else SearchBudget()
    result = exact_cc(target, args.k, budget)
    if result.status != "found":
        out.write(
            f"inconclusive after {result.nodes} nodes: CC >= {result.proven_lower_bound}\n"
        )
        return 1
    ideal = -(-args.n // args.k)
    strict = f" (>{ideal})" if result.m_star > ideal else ""
    out.write(f"m*={result.m_star}{strict}\n")
    _write(args.output, serialize_composition(result.witness), out)
    return 0


def _cmd_facts(args, out) -> int:
    report = validate_information_facts(args.trials, args.seed)
    if report.ok:
        out.write(f"{report.checks} checks over {report.trials} trials: all pass\n")
        return 0
    for failure in report.failures[:20]:
        out.write(failure + "\n")
    out.write(f"{len(report.failures)} of {report.checks} checks failed\n")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="comploc",
        description="compositions of k-local boolean functions: build, verify, reduce, analyze",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a stock composition")
    p.add_argument("function", choices=sorted(BUILDERS))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=_cmd_construct)

    p = sub.add_parser("verify", help="exhaustively verify a composition file")
    p.add_argument("file")
    p.add_argument("--target", choices=sorted(BUILDERS), required=True)
    p.add_argument("--band", help="restrict to Hamming weights LO:HI")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("reduce-bp", help="cut a branching program into a composition")
    p.add_argument("file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=_cmd_reduce_bp)

    p = sub.add_parser("to-depth3", help="lower a binary composition to depth 3")
    p.add_argument("file")
    p.add_argument("--polarity", choices=["sigma3", "pi3"], required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=_cmd_to_depth3)

    p = sub.add_parser("info", help="exact per-variable information report (CSV)")
    p.add_argument("file")
    p.add_argument("--band")
    p.add_argument("--csv", required=True)
    p.set_defaults(handler=_cmd_info)

    p = sub.add_parser("check-lemma", help="conditional-entropy gap check")
    p.add_argument("file")
    p.add_argument("--target", choices=["hw"], default="hw")
    p.add_argument("--band")
    p.set_defaults(handler=_cmd_check_lemma)

    p = sub.add_parser("reduce-maj", help="majority to partial Hamming weight")
    p.add_argument("file")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=_cmd_reduce_maj)

    p = sub.add_parser("witness", help="bias witness for one variable")
    p.add_argument("file")
    p.add_argument("--var", type=int, required=True)
    p.add_argument("--band")
    p.set_defaults(handler=_cmd_witness)

    p = sub.add_parser("search", help="exact composition complexity by exhaustion")
    p.add_argument("--target", choices=sorted(BUILDERS), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=_cmd_search)

    p = sub.add_parser("facts", help="randomized entropy-fact validation")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(handler=_cmd_facts)

    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args, out)
    except (SizingError, FormatError, FileNotFoundError) as exc:
        out.write(f"error: {exc}\n")
        return 2
    except (
        InfeasibleReductionError,
        RestrictionError,
        UnmappedPatternError,
        AnalysisPreconditionError,
    ) as exc:
        out.write(f"failed: {exc}\n")
        return 1
    except ValueError as exc:
        out.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
