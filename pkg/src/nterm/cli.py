"""Command-line interface.

One command per process.  Subcommands: shells, hfunc, en-class,
greedy, lemma51, rates, check-psi.  Tabular results go to stdout as
CSV (or to ``--out``); every command also emits a JSON document
(``--json-out`` or stdout for scalar results) whose metadata block
round-trips the resolved flags.  A ``--config FILE`` JSON object
supplies defaults; explicit flags win.

Exit status: 0 on success, 1 on a compute error (a machine-readable
JSON error record is written to stderr), 2 on parse or validation
errors.  Output is deterministic: identical configurations produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import lattice, rates, trig_lp, weights
from .approx import CoefficientSequence, FunctionClassSpec, class_best_nterm_sp, greedy_order, greedy_remainder_sp
from .functionals import DivergentTailError, NoThresholdError, h_functional
from .lattice import BudgetExceededError
from .trig_lp import GridSpec
from .weights import RearrangedWeight, parse_weight


class CliValidationError(Exception):
    """Bad flag combination detected before any computation."""


@dataclass
class RunConfig:
    """Resolved invocation: subcommand name plus its flag values."""

    command: str
    params: dict

    def metadata(self) -> dict:
        meta = {"command": self.command}
        for key, val in sorted(self.params.items()):
            meta[key] = _jsonable(val)
        return meta


def _jsonable(val):
    if isinstance(val, float):
        if math.isinf(val):
            return "inf" if val > 0 else "-inf"
        if math.isnan(val):
            return "nan"
        return val
    if isinstance(val, (np.floating, np.integer)):
        return _jsonable(val.item())
    if isinstance(val, (list, tuple)):
        return [_jsonable(v) for v in val]
    if isinstance(val, dict):
        return {k: _jsonable(v) for k, v in val.items()}
    return val


def _parse_r(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        r = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad quasi-norm order {text!r}")
    if r <= 0:
        raise argparse.ArgumentTypeError("quasi-norm order must be positive")
    return r


def _parse_int_list(text: str) -> list[int]:
    try:
        vals = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty integer list")
    return vals


def _parse_float_list(text: str) -> list[float]:
    try:
        vals = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty number list")
    return vals


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", help="write CSV table here instead of stdout")
    sub.add_argument("--json-out", help="write the JSON mirror here")
    sub.add_argument("--config", help="JSON file of flag defaults (explicit flags win)")
    sub.add_argument("--threads", type=int, default=1, help="cap internal parallelism")
    sub.add_argument("--budget", type=int, default=None,
                     help="override enumeration/grid point budgets (also env NTERM_BUDGET_POINTS)")
    sub.add_argument("--scan-budget", type=int, default=1_000_000,
                     help="threshold-scan budget for the extremal functionals")
    sub.add_argument("--tol", type=float, default=1e-9, help="relative tail truncation tolerance")
    sub.add_argument("--seed", type=int, default=0, help="RNG seed for randomized sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nterm",
        description="n-term approximation characteristics of weighted Fourier classes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shells", help="shell counts of the integer lattice and growth fit")
    p.add_argument("--r", type=_parse_r, default=math.inf)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--m-max", type=int, default=None)
    _common_flags(p)

    p = sub.add_parser("hfunc", help="extremal functional H_n over a rearranged weight")
    p.add_argument("--psi", default=None, help="weight, e.g. power:s=2 or const")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--r", type=_parse_r, default=math.inf)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--p-power", type=float, default=1.0,
                   help="rearrange psi^p-power instead of psi")
    _common_flags(p)

    p = sub.add_parser("en-class", help="exact best n-term class error in the p coefficient norm")
    p.add_argument("--psi", default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--n", type=_parse_int_list, default=None, help="n or comma list")
    p.add_argument("--r", type=_parse_r, default=math.inf)
    p.add_argument("--d", type=int, default=1)
    _common_flags(p)

    p = sub.add_parser("greedy", help="greedy n-term remainder of a coefficient file")
    p.add_argument("--in", dest="infile", default=None, help="coefficient sequence JSON")
    p.add_argument("--n", type=_parse_int_list, default=None, help="n or comma list")
    p.add_argument("--p", type=float, default=None)
    _common_flags(p)

    p = sub.add_parser("lemma51", help="L_p norms of random unit exponential sums")
    p.add_argument("--n-grid", type=_parse_int_list, default=None)
    p.add_argument("--p", type=_parse_float_list, default=None, help="p or comma list")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--cube-scale", type=float, default=2.0)
    _common_flags(p)

    p = sub.add_parser("rates", help="computed vs predicted order table with ratio window")
    p.add_argument("--quantity", choices=rates.QUANTITIES, default=None)
    p.add_argument("--theorem", choices=rates.THEOREM_TAGS, default=None)
    p.add_argument("--psi", default=None)
    p.add_argument("--n-grid", type=_parse_int_list, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--r", type=_parse_r, default=math.inf)
    p.add_argument("--d", type=int, default=1)
    _common_flags(p)

    p = sub.add_parser("check-psi", help="slow-vanishing class and decay-condition evidence")
    p.add_argument("--psi", default=None)
    p.add_argument("--s", type=float, default=None, help="also check the decay condition at this s")
    p.add_argument("--d", type=int, default=1)
    _common_flags(p)

    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                overrides = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliValidationError(f"cannot read config {args.config}: {exc}")
        if not isinstance(overrides, dict):
            raise CliValidationError("config file must hold a JSON object")
        defaults = {}
        for key, val in overrides.items():
            dest = key.replace("-", "_")
            if isinstance(val, str):
                if dest == "r":
                    val = _parse_r(val)
                elif dest == "n_grid" or (dest == "n" and args.command in ("en-class", "greedy")):
                    val = _parse_int_list(val)
                elif dest == "n":
                    val = int(val)
            defaults[dest] = val
        # flags given explicitly on the command line beat the config file
        explicit = _explicit_dests(argv)
        for dest, val in defaults.items():
            if dest not in explicit and hasattr(args, dest):
                setattr(args, dest, val)
    return args


def _explicit_dests(argv: list[str]) -> set[str]:
    dests = set()
    for tok in argv:
        if tok.startswith("--"):
            dests.add(tok[2:].split("=", 1)[0].replace("-", "_"))
    return dests


_REQUIRED = {
    "shells": ("m_max",),
    "hfunc": ("psi", "n", "s"),
    "en-class": ("psi", "q", "p", "n"),
    "greedy": ("infile", "n", "p"),
    "lemma51": ("n_grid", "p"),
    "rates": ("quantity", "psi", "n_grid"),
    "check-psi": ("psi",),
}


def _validate_required(args: argparse.Namespace) -> None:
    missing = [d for d in _REQUIRED[args.command] if getattr(args, d) is None]
    if missing:
        flags = ", ".join("--" + ("in" if d == "infile" else d.replace("_", "-"))
                          for d in missing)
        raise CliValidationError(f"missing required flags for {args.command}: {flags}")


def _as_int_list(val) -> list[int]:
    if isinstance(val, int):
        return [val]
    return [int(v) for v in val]


def _as_float_list(val) -> list[float]:
    if isinstance(val, (int, float)):
        return [float(val)]
    return [float(v) for v in val]


def _run_config(args: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in vars(args).items() if k != "command"}
    return RunConfig(command=args.command, params=params)


def _emit(cfg: RunConfig, csv_text: str | None, result: dict, args) -> None:
    doc = json.dumps({"metadata": cfg.metadata(), "result": _jsonable(result)},
                     sort_keys=True)
    if csv_text is not None:
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(csv_text)
        else:
            sys.stdout.write(csv_text)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(doc + "\n")
    if csv_text is None and not args.json_out:
        sys.stdout.write(doc + "\n")


def _cmd_shells(args, cfg: RunConfig) -> int:
    if args.d < 1 or args.m_max < 1:
        raise CliValidationError("need d >= 1 and m-max >= 1")
    sd = lattice.shell_counts(args.r, args.d, args.m_max, budget=args.budget)
    fit = lattice.fit_growth_bounds(sd)
    buf = ["m,nu,V"]
    for m in range(sd.m_max + 1):
        buf.append(f"{m},{int(sd.nu[m])},{int(sd.V[m])}")
    csv_text = "\n".join(buf) + "\n"
    result = {
        "nu": [int(v) for v in sd.nu],
        "V": [int(v) for v in sd.V],
        "fit": dataclasses.asdict(fit),
    }
    _emit(cfg, csv_text, result, args)
    return 0


def _cmd_hfunc(args, cfg: RunConfig) -> int:
    psi = parse_weight(args.psi)
    if args.d < 1:
        raise CliValidationError("need d >= 1")
    shells = lattice.shell_counts(args.r, args.d, 8, budget=args.budget)
    rw = RearrangedWeight(psi, shells, p_power=args.p_power, budget=args.budget)
    res = h_functional(rw, int(args.n), args.s, tol=args.tol, scan_budget=args.scan_budget)
    result = {
        "value": res.value,
        "l_star": res.l_star,
        "regime": res.regime,
        "tail_truncation_error_bound": res.tail_truncation_error_bound,
    }
    _emit(cfg, None, result, args)
    return 0


def _cmd_en_class(args, cfg: RunConfig) -> int:
    psi = parse_weight(args.psi)
    spec = FunctionClassSpec(q=args.q, r=args.r, psi=psi, d=args.d)
    shells = lattice.shell_counts(args.r, args.d, 8, budget=args.budget)
    rows = []
    for n in _as_int_list(args.n):
        res = class_best_nterm_sp(spec, n, args.p, shells=shells,
                                  tol=args.tol, scan_budget=args.scan_budget)
        rows.append((n, res.value, res.l_star, res.regime))
    buf = ["n,en"] + [f"{n},{v:.17g}" for n, v, _, _ in rows]
    csv_text = "\n".join(buf) + "\n"
    result = {"rows": [
        {"n": n, "en": v, "l_star": l, "regime": reg} for n, v, l, reg in rows
    ]}
    _emit(cfg, csv_text, result, args)
    return 0


def _cmd_greedy(args, cfg: RunConfig) -> int:
    try:
        with open(args.infile) as fh:
            f = CoefficientSequence.from_json(fh.read())
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise CliValidationError(f"cannot read coefficient file {args.infile}: {exc}")
    rows = [(n, greedy_remainder_sp(f, n, args.p)) for n in _as_int_list(args.n)]
    order = greedy_order(f)
    buf = ["n,remainder"] + [f"{n},{v:.17g}" for n, v in rows]
    csv_text = "\n".join(buf) + "\n"
    result = {
        "rows": [{"n": n, "remainder": v} for n, v in rows],
        "order": [list(k) for k in order],
    }
    _emit(cfg, csv_text, result, args)
    return 0


def _cmd_lemma51(args, cfg: RunConfig) -> int:
    if args.d < 1 or args.trials < 1:
        raise CliValidationError("need d >= 1 and trials >= 1")
    rng = np.random.default_rng(args.seed)
    p_list = _as_float_list(args.p)
    buf = ["n,p,trial,norm,ratio"]
    rows = []
    for n in _as_int_list(args.n_grid):
        side = max(1, int(math.ceil(args.cube_scale * n ** (1.0 / args.d))))
        box = 2 * side + 1
        if box ** args.d < n:
            raise CliValidationError(f"cube of side {side} too small for n={n} frequencies")
        for trial in range(args.trials):
            flat = rng.choice(box ** args.d, size=n, replace=False)
            gamma = []
            for idx in sorted(int(v) for v in flat):
                k = []
                for _ in range(args.d):
                    idx, rem = divmod(idx, box)
                    k.append(rem - side)
                gamma.append(tuple(k))
            kmax = max(max(abs(c) for c in k) for k in gamma)
            for p in p_list:
                N = int(2 * math.ceil(p) * max(kmax, 1) + 1)
                g = GridSpec(d=args.d, N=N)
                val = trig_lp.exponential_sum_norm(gamma, p, g, cube_scale=None,
                                                   budget=args.budget)
                ratio = val / n ** (1.0 - 1.0 / p)
                rows.append({"n": n, "p": p, "trial": trial, "norm": val, "ratio": ratio})
                buf.append(f"{n},{p:g},{trial},{val:.17g},{ratio:.17g}")
    csv_text = "\n".join(buf) + "\n"
    _emit(cfg, csv_text, {"rows": rows}, args)
    return 0


def _cmd_rates(args, cfg: RunConfig) -> int:
    psi = parse_weight(args.psi)
    table = rates.rate_table(
        args.quantity,
        _as_int_list(args.n_grid),
        psi,
        args.d,
        r=args.r,
        q=args.q,
        p=args.p,
        s=args.s,
        theorem=args.theorem,
        tol=args.tol,
        scan_budget=args.scan_budget,
        threads=args.threads,
    )
    k1, k2 = rates.ratio_window(table)
    result = json.loads(table.to_json())
    result["ratio_window"] = {"K1": k1, "K2": k2}
    _emit(cfg, table.to_csv(), result, args)
    return 0


def _cmd_check_psi(args, cfg: RunConfig) -> int:
    psi = parse_weight(args.psi)
    report = {"class_b": dataclasses.asdict(weights.check_class_b(psi))}
    report["convexity_evidence"] = weights.convexity_evidence(psi)
    report["decreasing_evidence"] = weights.decreasing_evidence(psi)
    if args.s is not None:
        report["decay"] = dataclasses.asdict(
            weights.check_decay_condition(psi, args.s, args.d))
    _emit(cfg, None, report, args)
    return 0


_COMMANDS = {
    "shells": _cmd_shells,
    "hfunc": _cmd_hfunc,
    "en-class": _cmd_en_class,
    "greedy": _cmd_greedy,
    "lemma51": _cmd_lemma51,
    "rates": _cmd_rates,
    "check-psi": _cmd_check_psi,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except CliValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        _validate_required(args)
    except CliValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    cfg = _run_config(args)
    try:
        return _COMMANDS[args.command](args, cfg)
    except (CliValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DivergentTailError, NoThresholdError, BudgetExceededError,
            OverflowError, FloatingPointError) as exc:
        record = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        print(json.dumps(record, sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
