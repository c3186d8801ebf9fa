"""Command-line entry point: ``comack <command> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import budget as _budget
from .blocks import BlockError, block_idempotents, block_report, default_field_degree, iota, verify_iota_blocks
from .cartan import block_catalog, cartan_block, cartan_pgroup, cyclic_criterion_report, same_fingerprint
from .casestudy import block_census, gauss_report
from .exactla.field import field_make, is_prime
from .groups import build_group, is_p_power
from .mackey import comu_basis, dump_basis, mackey_basis, verify_yoshida


class UsageError(ValueError):
    pass


def _field(G, p: int | None, m: int | None):
    if p is None:
        raise UsageError("-p is required")
    if not is_prime(p):
        raise UsageError(f"p={p} is not prime")
    return field_make(p, m if m is not None else default_field_degree(G, p))


def _budget_dict() -> dict:
    b = _budget.current()
    return {"max_order": b.max_order, "max_lattice_order": b.max_lattice_order, "max_dim": b.max_dim}


def _check_lattice(G):
    cap = _budget.current().max_lattice_order
    if G.order > cap:
        raise _budget.BudgetExceeded(f"subgroup lattice of a group of order {G.order} exceeds budget {cap}")


# -- commands: each returns (result dict, csv rows or None) -----------------------

def cmd_group(args):
    G = build_group(args.spec)
    out = {"group": G.label, "order": G.order, "exponent": G.exponent, "abelian": G.is_abelian,
           "classes": len(G.conjugacy_classes()), "center_order": G.center.order}
    if G.order <= _budget.current().max_lattice_order:
        out["subgroups"] = len(G.all_subgroups())
        out["subgroup_classes"] = len(G.subgroup_conjugacy_classes())
    else:
        out["subgroups"] = "budget"
    return out, None


def cmd_comu_basis(args):
    G = build_group(args.spec)
    _check_lattice(G)
    keys = comu_basis(G)
    out = {"group": G.label, "comu_basis_size": len(keys), "mackey_basis_size": len(mackey_basis(G))}
    if args.dump:
        out["basis"] = dump_basis(G, keys)
    return out, [["H", "K", "x"]] + [[k.H, k.K, G.name(k.x)] for k in keys]


def cmd_verify_yoshida(args):
    G = build_group(args.spec)
    _check_lattice(G)
    rep = verify_yoshida(G, _field(G, args.p, args.m))
    out = rep.as_dict()
    out["passed"] = rep.passed
    return out, None


def cmd_blocks(args):
    G = build_group(args.spec)
    ctx = _field(G, args.p, args.m)
    out = block_report(G, ctx, args.seed, with_iota=args.iota)
    if args.iota:
        _check_lattice(G)
        blocks = block_idempotents(G, ctx, args.seed)
        rep = verify_iota_blocks(blocks, check_central=True)
        out["iota"] = {"idempotent": rep.idempotent, "orthogonal": rep.orthogonal,
                       "sums_to_one": rep.sums_to_one, "central": rep.central,
                       "images": [[f"{k.H},{k.K},{G.name(k.x)}={ctx.format(int(c))}"
                                   for k, c in iota(b.element).items()] for b in blocks]}
    rows = [["index", "dim", "lambda_by_class"]] + [[r["index"], r["dim"], " ".join(r["lambda_by_class"])]
                                                     for r in out["blocks"]]
    return out, rows


def _cartan_for(G, p, m, block_index, seed, pgroup_fast):
    if pgroup_fast:
        if not is_p_power(G.order, p):
            raise UsageError("--pgroup-fast needs a p-group")
        return cartan_pgroup(G, p)
    _check_lattice(G)
    ctx = _field(G, p, m)
    blocks = block_idempotents(G, ctx, seed)
    if not 0 <= block_index < len(blocks):
        raise UsageError(f"block index {block_index} out of range (0..{len(blocks) - 1})")
    b = blocks[block_index]
    return cartan_block(G, b, block_catalog(G, p, b, seed), blocks)


def cmd_cartan(args):
    G = build_group(args.spec)
    C = _cartan_for(G, args.p, args.m, args.block, args.seed, args.pgroup_fast)
    out = C.as_dict()
    out["symmetric"] = C.is_symmetric()
    rows = [[""] + C.row_labels] + [[lab] + row for lab, row in zip(C.row_labels, C.matrix.tolist())]
    return out, rows


def cmd_criterion(args):
    G = build_group(args.spec)
    if args.p is None or not is_p_power(G.order, args.p):
        raise UsageError(f"{G.label} is not a p-group for p={args.p}")
    _check_lattice(G)
    rep = cyclic_criterion_report(G, args.p)
    out = rep.as_dict()
    out["verdict"] = ("cyclic" if rep.cyclic else "non-cyclic") + (", det != 0" if rep.det else ", det 0")
    return out, None


def cmd_casestudy(args):
    if args.p is None:
        raise UsageError("--p is required")
    out = {}
    if args.census or not args.gauss:
        out["census"] = block_census(args.p, args.seed)
    if args.gauss or not args.census:
        if args.p % 8 != 1:
            raise UsageError(f"the membership test needs p = 1 mod 8, got {args.p}")
        out["gauss"] = gauss_report(args.p, args.seed)
    return out, None


def _parse_block_ref(text: str):
    spec, sep, idx = text.rpartition(":")
    if not sep or not idx.strip().isdigit():
        raise UsageError(f"expected <spec>:<block>, got {text!r}")
    return spec, int(idx)


def cmd_fingerprint(args):
    mats = []
    for ref in (args.a, args.b):
        spec, i = _parse_block_ref(ref)
        mats.append(_cartan_for(build_group(spec), args.p, args.m, i, args.seed, False))
    eq = same_fingerprint(*mats)
    return {"a": args.a, "b": args.b, "matrix_a": mats[0].matrix.tolist(), "matrix_b": mats[1].matrix.tolist(),
            "verdict": "equal" if eq else "different"}, None


# -- output ------------------------------------------------------------------------

def _plain(obj, indent=0) -> list[str]:
    pad = "  " * indent
    lines = []
    for k, v in obj.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.extend(_plain(v, indent + 1))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{pad}{k}:")
            for item in v:
                lines.append(f"{pad}  -")
                lines.extend(_plain(item, indent + 2))
        elif isinstance(v, list) and v and isinstance(v[0], list):
            lines.append(f"{pad}{k}:")
            lines.extend(f"{pad}  " + " ".join(str(x) for x in row) for row in v)
        elif isinstance(v, list) and any(isinstance(x, str) and " " in x for x in v):
            lines.append(f"{pad}{k}:")
            lines.extend(f"{pad}  {x}" for x in v)
        elif isinstance(v, list):
            lines.append(f"{pad}{k}: " + " ".join(str(x) for x in v))
        else:
            lines.append(f"{pad}{k}: {v}")
    return lines


def render(command: str, seed: int, result: dict, rows, fmt: str) -> str:
    envelope = {"command": command, "seed": seed, "budget": _budget_dict(), "result": result}
    if fmt == "json":
        return json.dumps(envelope, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["# command", command, "seed", seed])
        if rows:
            w.writerows(rows)
        else:
            w.writerow(["key", "value"])
            for k, v in sorted(result.items()):
                w.writerow([k, json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v])
        return buf.getvalue()
    head = [f"# comack {command} (seed {seed})"]
    return "\n".join(head + _plain(result)) + "\n"


COMMANDS = {
    "group": cmd_group, "comu-basis": cmd_comu_basis, "verify-yoshida": cmd_verify_yoshida,
    "blocks": cmd_blocks, "cartan": cmd_cartan, "criterion": cmd_criterion,
    "casestudy": cmd_casestudy, "fingerprint": cmd_fingerprint,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["plain", "json", "csv"], default="plain")

    field_opts = argparse.ArgumentParser(add_help=False)
    field_opts.add_argument("-p", type=int)
    field_opts.add_argument("-m", type=int, help="field degree (default: splitting degree)")

    ap = argparse.ArgumentParser(prog="comack", description="Cohomological Mackey algebra computations.")
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("group", parents=[common], help="order, classes and subgroup counts")
    s.add_argument("spec")
    s = sub.add_parser("comu-basis", parents=[common], help="basis of the cohomological Mackey algebra")
    s.add_argument("spec")
    s.add_argument("--dump", action="store_true")
    s = sub.add_parser("verify-yoshida", parents=[common, field_opts], help="span vs matrix products")
    s.add_argument("spec")
    s = sub.add_parser("blocks", parents=[common, field_opts], help="block idempotents")
    s.add_argument("spec")
    s.add_argument("--iota", action="store_true", help="include the images in the Mackey algebra")
    s = sub.add_parser("cartan", parents=[common, field_opts], help="Cartan matrix of a block")
    s.add_argument("spec")
    s.add_argument("--block", type=int, default=0)
    s.add_argument("--pgroup-fast", action="store_true")
    s = sub.add_parser("criterion", parents=[common, field_opts], help="cyclic determinant criterion")
    s.add_argument("spec")
    s = sub.add_parser("casestudy", parents=[common], help="xq8 census and Gaussian sums")
    s.add_argument("--p", type=int)
    s.add_argument("--census", action="store_true")
    s.add_argument("--gauss", action="store_true")
    s = sub.add_parser("fingerprint", parents=[common, field_opts], help="compare two block Cartan matrices")
    s.add_argument("a", help="<spec>:<block>")
    s.add_argument("b", help="<spec>:<block>")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result, rows = COMMANDS[args.command](args)
    except _budget.BudgetExceeded as exc:
        print(f"comack: budget exceeded: {exc}", file=sys.stderr)
        return 2
    except (ValueError, BlockError) as exc:
        print(f"comack: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(render(args.command, args.seed, result, rows, args.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
