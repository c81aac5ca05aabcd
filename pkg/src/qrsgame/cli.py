"""Command-line front end: ``qrsgame {bound,rfactor,score,cheat,simulate,sweep}``.

Every subcommand writes a table as csv (default) or json. json output wraps
the same rows with a ``metadata`` object (version, command, config, seed).

Exit codes: 0 success, 1 usage or input error, 2 certificate failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, linalg
from .bounds import MAX_BOUND_N, load_preparation, r_factor_argmax, steering_bound
from .errors import QRSError
from .game import (
    CheatStrategy,
    Exact,
    FixedState,
    Reported,
    ScoreSpec,
    SearchGrid,
    Visibility,
    cheat_search,
    exact_honest_score,
    phi_plus_state,
    product_state,
)
from .montecarlo import SWEEP_AXES, Cheat, Honest, SimConfig, simulate, sweep
from .settings import FAMILIES, builtin_directions, load_directions

EXIT_OK, EXIT_USAGE, EXIT_CERT = 0, 1, 2

log = logging.getLogger("qrsgame")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# -- argument helpers ------------------------------------------------------


def _eta_h(text: str) -> float:
    v = float(text)
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError(f"eta must lie in (0, 1], got {text}")
    return v


def _unit(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"value must lie in [0, 1], got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _vector(text: str) -> tuple[float, float, float]:
    parts = text.replace(",", " ").split()
    if len(parts) != 3:
        raise UsageError(f"expected three components, got {text!r}")
    return tuple(float(p) for p in parts)


def _add_common(p: argparse.ArgumentParser, *, eta=True) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", "--n-family", dest="family", choices=sorted(FAMILIES), help="built-in direction family")
    src.add_argument("--directions", type=Path, help="direction file (one 'x y z' per line)")
    if eta:
        p.add_argument("--eta-h", type=_eta_h, default=1.0, help="Alice's heralding efficiency (default 1)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path, help="output path (default stdout)")
    p.add_argument(
        "--policy",
        action="append",
        default=[],
        metavar="FIELD=VALUE",
        help="override a numeric-policy tolerance, e.g. psd_slack=1e-9",
    )


def _add_prep(p: argparse.ArgumentParser) -> None:
    p.add_argument("--prep", type=Path, help="preparation report file ('j s x y z' lines)")
    p.add_argument(
        "--model",
        default="exact",
        help="preparation model when no --prep: exact | visibility:V | fixed:X,Y,Z",
    )
    p.add_argument("--r", default=None, help="bound multiplier r, or 'auto' to compute it from the preparation")


def _directions(args):
    if args.family:
        return builtin_directions(args.family)
    return load_directions(args.directions)


def _model(args, ds):
    if getattr(args, "prep", None):
        return Reported(load_preparation(args.prep, ds.n))
    kind, _, arg = args.model.partition(":")
    if kind == "exact":
        return Exact()
    if kind == "visibility":
        return Visibility(float(arg))
    if kind in ("fixed", "fixed-state"):
        return FixedState(_vector(arg))
    raise UsageError(f"unknown preparation model {args.model!r}")


def _spec(args, ds, model, eta_h=None):
    eta_h = args.eta_h if eta_h is None else eta_h
    r = args.r
    if r is None:
        r = "auto" if args.prep else "1"
    if r == "auto":
        return ScoreSpec.with_preparation(ds, eta_h, model)
    return ScoreSpec.create(ds, eta_h, float(r))


def _state(text: str) -> np.ndarray:
    """Shared two-qubit state from a name.

    phi-plus, product-00, product-01, mixed, werner:P (P phi+ + (1-P) I/4),
    or a path to a .npy file holding a 4x4 density matrix.
    """
    if text == "phi-plus":
        return phi_plus_state()
    if text == "mixed":
        return np.eye(4, dtype=complex) / 4
    if text.startswith("product-") and len(text) == 10:
        z = {"0": (0, 0, 1), "1": (0, 0, -1)}
        try:
            return product_state(z[text[-2]], z[text[-1]])
        except KeyError:
            raise UsageError(f"unknown product state {text!r}") from None
    if text.startswith("werner:"):
        p = float(text.split(":", 1)[1])
        return p * phi_plus_state() + (1 - p) * np.eye(4) / 4
    path = Path(text)
    if path.suffix == ".npy" and path.exists():
        return np.load(path)
    raise UsageError(f"unknown state {text!r}")


def _eta_grid(args) -> list[float]:
    etas = list(args.eta or [])
    if args.eta_grid:
        try:
            start, stop, step = (float(x) for x in args.eta_grid.split(":"))
        except ValueError:
            raise UsageError("--eta-grid expects START:STOP:STEP") from None
        if step <= 0:
            raise UsageError("--eta-grid step must be positive")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        etas += [round(start + i * step, 12) for i in range(count)]
    if not etas:
        raise UsageError("give at least one --eta or an --eta-grid")
    for e in etas:
        _eta_h(repr(e))
    return etas


def _fmt_ks(d: dict) -> tuple[str, str]:
    ks = sorted(d)
    return ";".join(str(k) for k in ks), ";".join(repr(d[k]) for k in ks)


def _signs(seq) -> str:
    return ";".join(f"{a:+d}" for a in seq)


# -- subcommands -----------------------------------------------------------


def cmd_bound(args):
    ds = _directions(args)
    if ds.n > MAX_BOUND_N:
        raise UsageError(f"exhaustive bound refused for n = {ds.n} > {MAX_BOUND_N}")
    rows = []
    for eta in _eta_grid(args):
        res = steering_bound(ds, eta)
        ks, ws = _fmt_ks(res.optimal_weights)
        rows.append({"eta_h": eta, "c_n": res.value, "k_support": ks, "weights": ws})
    return rows, {"n": ds.n}, EXIT_OK


def cmd_rfactor(args):
    ds = _directions(args)
    prep = load_preparation(args.prep, ds.n)
    bound = steering_bound(ds, args.eta_h)
    r, signs = r_factor_argmax(prep, ds, bound)
    return [{"eta_h": args.eta_h, "c_n": bound.value, "r": r, "signs": _signs(signs)}], {"n": ds.n}, EXIT_OK


def cmd_score(args):
    ds = _directions(args)
    model = _model(args, ds)
    spec = _spec(args, ds, model)
    res = exact_honest_score(_state(args.state), spec, model, args.eta_m)
    rows = [
        {"j": j, "s": s, "corr": corr, "herald": herald, "total": res.total, "eta_h_hat": res.alice_herald}
        for j, s, corr, herald in res.rows()
    ]
    return rows, {"r": spec.r, "c_n": spec.bound, "total": res.total}, EXIT_OK


def cmd_cheat(args):
    ds = _directions(args)
    model = _model(args, ds)
    spec = _spec(args, ds, model)
    grid = SearchGrid(args.subdivisions, args.mu_points, tuple(args.m_norms), not args.no_informed)
    res = cheat_search(spec, model, grid, args.tolerance, exhaustive=args.exhaustive)
    st = res.strategy.describe()
    row = {
        "certificate": "PASS" if res.passed else "FAIL",
        "supremum": res.supremum,
        "tolerance": res.tolerance,
        "induced_eta": res.induced_eta,
        "r": spec.r,
        "mu": st["mu"],
        "m": ";".join(repr(c) for c in st["m"]),
        "favorable_set": ";".join(str(j) for j in st["favorable_set"]),
        "report_rule": ";".join(
            f"{j}:{_signs([rule['+1'], rule['-1']])}" for j, rule in st["report_rule"].items()
        ),
        "report_weight": f"{st['report_weight']['+1']:g};{st['report_weight']['-1']:g}",
        "evaluated": res.evaluated,
    }
    print(f"certificate {row['certificate']}: supremum {res.supremum:.3e} (tolerance {res.tolerance:g})", file=sys.stderr)
    return [row], {"r": spec.r}, EXIT_OK if res.passed else EXIT_CERT


def _players(args, ds):
    if args.cheat:
        strat = json.loads(Path(args.cheat).read_text())
        rule = strat.get("report_rule", {"+1": 1, "-1": -1})

        def conv(d):
            return {int(k): v for k, v in d.items()}

        if all(isinstance(v, dict) for v in rule.values()):
            rule = {int(j): conv(v) for j, v in rule.items()}
        else:
            rule = conv(rule)
        weight = conv(strat.get("report_weight", {"+1": 1.0, "-1": 1.0}))
        return Cheat(CheatStrategy(strat["mu"], tuple(strat["m"]), tuple(strat["favorable_set"]), rule, weight))
    return Honest(_state(args.state), args.eta_m)


def _sim_config(args):
    ds = _directions(args)
    model = _model(args, ds)
    if args.eta_h == 0:
        spec = ScoreSpec.create(ds, 0.0, 1.0 if args.r in (None, "auto") else float(args.r))
    else:
        spec = _spec(args, ds, model)
    return SimConfig(spec, _players(args, ds), args.rounds, args.seed, model)


def _estimate_row(est) -> dict:
    return {
        "eta_h_hat": est.eta_h_hat,
        "mean": est.mean,
        "std_error": est.std_error,
        "rounds_valid": est.rounds_valid,
        "seed": est.seed,
    }


def cmd_simulate(args):
    cfg = _sim_config(args)
    est = simulate(cfg)
    return [_estimate_row(est)], {"rounds": args.rounds}, EXIT_OK


def cmd_sweep(args):
    cfg = _sim_config(args)
    values = args.values if args.axis == "n-family" else [float(v) for v in args.values]
    rows = []
    for pt in sweep(cfg, args.axis, values):
        row = {"axis": args.axis, "value": pt.value}
        if pt.estimate is not None:
            row.update(_estimate_row(pt.estimate))
            row["exact"] = pt.exact
            row["error"] = ""
        else:
            row.update(dict.fromkeys(("eta_h_hat", "mean", "std_error", "rounds_valid"), ""))
            row.update(seed=pt.seed, exact="", error=pt.error)
        rows.append(row)
    return rows, {"rounds": args.rounds, "axis": args.axis}, EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qrsgame", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"qrsgame {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", help="steering bound C_n(eta) over an eta grid")
    _add_common(p, eta=False)
    p.add_argument("--eta", type=_eta_h, action="append", help="heralding value (repeatable)")
    p.add_argument("--eta-grid", help="START:STOP:STEP")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("rfactor", help="preparation correction factor r")
    _add_common(p)
    p.add_argument("--prep", type=Path, required=True)
    p.set_defaults(func=cmd_rfactor)

    p = sub.add_parser("score", help="exact honest score breakdown")
    _add_common(p)
    _add_prep(p)
    p.add_argument("--state", default="phi-plus")
    p.add_argument("--eta-m", type=_unit, default=1.0, help="Bob's measurement efficiency")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("cheat", help="search adversarial strategies and certify the bound")
    _add_common(p)
    _add_prep(p)
    p.add_argument("--subdivisions", type=int, default=3, help="icosphere level (3 gives 642 directions)")
    p.add_argument("--mu-points", type=_positive_int, default=101)
    p.add_argument("--m-norms", type=float, nargs="+", default=[0.0, 0.5, 1.0])
    p.add_argument("--no-informed", action="store_true", help="sphere grid only")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--exhaustive", action="store_true", help="enumerate every answer rule literally")
    p.set_defaults(func=cmd_cheat)

    for name, func in (("simulate", cmd_simulate), ("sweep", cmd_sweep)):
        p = sub.add_parser(name, help="Monte Carlo estimate" if name == "simulate" else "Monte Carlo sweep")
        _add_common(p, eta=False)
        _add_prep(p)
        p.add_argument("--eta-h", type=_unit, default=1.0)
        p.add_argument("--state", default="phi-plus")
        p.add_argument("--eta-m", type=_unit, default=1.0)
        p.add_argument("--cheat", type=Path, help="json file describing an adversarial strategy")
        p.add_argument("--rounds", type=_positive_int, required=True)
        p.add_argument("--seed", type=_seed, default=0)
        if name == "sweep":
            p.add_argument("--axis", choices=SWEEP_AXES, required=True)
            p.add_argument("--values", nargs="*", default=[])
        p.set_defaults(func=func)
    return ap


def _echo(args) -> dict:
    out = {}
    for k, v in vars(args).items():
        if k in ("func", "out", "format", "verbose"):
            continue
        out[k] = str(v) if isinstance(v, Path) else v
    return out


def render(rows: list[dict], fmt: str, metadata: dict) -> str:
    if fmt == "json":
        return json.dumps({"metadata": metadata, "rows": rows}, indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    previous = None
    try:
        overrides = {}
        for item in args.policy:
            key, _, val = item.partition("=")
            if key not in linalg.NumericPolicy.__dataclass_fields__:
                raise UsageError(f"unknown policy field {key!r}")
            overrides[key] = float(val)
        previous = linalg.set_policy(**overrides)
        rows, extra, code = args.func(args)
    except (UsageError, QRSError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"qrsgame {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if previous is not None:
            linalg.set_policy(**vars(previous))
    metadata = {"version": __version__, "command": args.command, "config": _echo(args), "seed": getattr(args, "seed", None)}
    metadata.update(extra)
    text = render(rows, args.format, metadata)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
