"""Command-line interface: compute quantities, run verification suites,
sweep a preset parameter to CSV.

Exit codes: 0 success, 1 verification check failed, 2 input error,
3 dimension/resource cap exceeded, 4 internal invariant violation.
Identical invocations with identical flags produce byte-identical output.
"""

from __future__ import annotations

import argparse
import sys

from .ci import (
    ci_lower,
    ci_product_regularized,
    ci_pure_oneway,
    ci_pure_regularized,
    lqsm_fidelity_lower,
    merge_conditional_entropy_check,
    monotone_necessary_check,
    family15_separation_report,
    resolve_tripartite,
)
from .errors import (
    AncillaTooLarge,
    DimensionTooLarge,
    DuplicateParty,
    InternalInvariantError,
    InvalidArgument,
    InvalidMatrix,
    InvalidPartition,
    InvalidPreset,
    LayoutMismatch,
    NotPSD,
    NotPure,
    NotRankOne,
    ObjectiveError,
    ShapeMismatch,
    StateFileError,
    UnknownParty,
)
from .info import (
    Partition,
    conditional_entropy,
    conditional_mutual_info,
    mutual_info,
    vn_entropy,
)
from .measures import (
    discord,
    ed_interval,
    eoa,
    eof,
    kw_discord,
    log_negativity,
    one_way_ci,
)
from .optim import OptimizerConfig
from .states import PureState, load_state_file, partial_trace, preset
from .suites import SUITES, run_suites

_INPUT_ERRORS = (
    InvalidMatrix,
    NotPSD,
    NotPure,
    NotRankOne,
    DuplicateParty,
    UnknownParty,
    InvalidPartition,
    LayoutMismatch,
    ShapeMismatch,
    InvalidPreset,
    InvalidArgument,
    StateFileError,
)
_CAP_ERRORS = (DimensionTooLarge, AncillaTooLarge)

_TAGS = {
    "exact": "exact",
    "lower_bound_estimate": "lower-est",
    "upper_bound_estimate": "upper-est",
}

QUANTITIES = (
    "entropy",
    "mutual-info",
    "cond-entropy",
    "cmi",
    "discord",
    "eoa",
    "eof",
    "kw-discord",
    "log-neg",
    "ed-interval",
    "one-way-ci",
    "ci-bounds",
    "ci-pure",
    "ci-pure-reg",
    "ci-product-reg",
    "lqsm-bound",
    "merge-check",
    "monotone-check",
)

SWEEP_QUANTITIES = ("entropy", "ci-bounds", "oneway-gap")


def _group(arg: str | None) -> tuple[str, ...] | None:
    if arg is None:
        return None
    labels = tuple(t.strip() for t in arg.split(",") if t.strip())
    if not labels:
        raise InvalidArgument(f"empty party group {arg!r}")
    return labels


def _gname(labels) -> str:
    return "+".join(labels)


def _load_state(args):
    if (args.state is None) == (args.preset is None):
        raise InvalidArgument("exactly one of --state or --preset is required")
    if args.state is not None:
        state = load_state_file(args.state)
        origin = f"file {args.state}"
    else:
        state = preset(args.preset, tuple(args.param or ()))
        params = ",".join(format(p, "g") for p in (args.param or ()))
        origin = f"preset {args.preset}" + (f"({params})" if params else "")
    return state, origin


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(
        restarts=args.restarts,
        max_iters=args.max_iters,
        tol=args.tol,
        seed=args.seed,
    )


def _emit(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


class _Row:
    """One reported value: label, number, direction tag, unit."""

    def __init__(self, label, value, tag, unit="bits"):
        self.label = label
        self.value = float(value)
        self.tag = tag
        self.unit = unit

    def text(self) -> str:
        unit = f" {self.unit}" if self.unit else ""
        return f"{self.label} = {self.value:.6f}{unit} ({self.tag})"

    def csv(self) -> str:
        return f"{self.label},{format(self.value, '.17g')},{self.tag}"


def _marginal_entropy(state, labels) -> float:
    rho = state.to_mstate() if isinstance(state, PureState) else state
    drop = [l for l in rho.layout.labels if l not in labels]
    return vn_entropy(partial_trace(rho, drop) if drop else rho)


def _xy_defaults(layout, args, x_all_but_last=False):
    labels = layout.labels
    x = _group(args.x)
    y = _group(args.y)
    if x is None:
        x = labels[:-1] if x_all_but_last else (labels[0],)
    if y is None:
        y = tuple(l for l in labels if l not in x)
    return x, y


def _compute_rows(quantity, state, args, cfg):
    layout = state.layout
    rho = state

    if quantity == "entropy":
        target = _group(args.x) or layout.labels
        return [_Row(f"S({_gname(target)})", _marginal_entropy(rho, target), "exact")]

    if quantity == "mutual-info":
        x, y = _xy_defaults(layout, args)
        v = mutual_info(rho, Partition(x, y))
        return [_Row(f"I({_gname(x)}:{_gname(y)})", v, "exact")]

    if quantity == "cond-entropy":
        x, y = _xy_defaults(layout, args)
        v = conditional_entropy(rho, x, y)
        return [_Row(f"S({_gname(x)}|{_gname(y)})", v, "exact")]

    if quantity == "cmi":
        labels = layout.labels
        x = _group(args.x) or (labels[0],)
        y = _group(args.y) or (labels[1],)
        z = _group(args.z)
        if z is None:
            z = tuple(l for l in labels if l not in x + y)
        v = conditional_mutual_info(rho, x, y, z)
        zs = _gname(z) if z else "-"
        return [_Row(f"I({_gname(x)}:{_gname(y)}|{zs})", v, "exact")]

    if quantity in ("discord", "kw-discord"):
        x, y = _xy_defaults(layout, args, x_all_but_last=True)
        if len(y) != 1:
            raise InvalidArgument("the measured group must be a single party")
        fn = discord if quantity == "discord" else kw_discord
        est = fn(rho, x, y[0], cfg)
        return [_Row(f"discord({_gname(x)}|{y[0]})", est.value, _TAGS[est.direction])]

    if quantity in ("eoa", "eof"):
        a = _group(args.alice) or (layout.labels[0],)
        rest = tuple(l for l in layout.labels if l not in a)
        fn = eoa if quantity == "eoa" else eof
        est = fn(rho, a, cfg)
        return [
            _Row(
                f"{quantity}({_gname(a)}:{_gname(rest)})",
                est.value,
                _TAGS[est.direction],
            )
        ]

    if quantity == "log-neg":
        x, y = _xy_defaults(layout, args)
        v = log_negativity(
            rho.to_mstate() if isinstance(rho, PureState) else rho, Partition(x, y)
        )
        return [_Row(f"log-negativity({_gname(x)}:{_gname(y)})", v, "exact")]

    if quantity == "ed-interval":
        x, y = _xy_defaults(layout, args)
        band = ed_interval(
            rho.to_mstate() if isinstance(rho, PureState) else rho, Partition(x, y)
        )
        name = f"distillable({_gname(x)}:{_gname(y)})"
        if band.exact:
            return [_Row(name, band.lower, "exact")]
        return [
            _Row(name + "-lower", band.lower, "lower-est"),
            _Row(name + "-upper", band.upper, "upper-est"),
        ]

    if quantity == "one-way-ci":
        a, b, c = resolve_tripartite(layout, _group(args.alice), _group(args.bob), _group(args.charlie))
        est = one_way_ci(rho, a, b[0] if len(b) == 1 else b, c, cfg)
        return [
            _Row(
                f"one-way-ci({_gname(a)};{_gname(b)}>{_gname(c)})",
                est.value,
                _TAGS[est.direction],
            )
        ]

    if quantity == "ci-bounds":
        report = ci_lower(
            rho, _group(args.alice), _group(args.bob), _group(args.charlie), cfg
        )
        return [
            _Row(f"ci-lower[{report.lower_source}]", report.lower, "lower-est"),
            _Row(f"ci-upper[{report.upper_source}]", report.upper, "upper-est"),
        ]

    if quantity == "ci-pure":
        est = ci_pure_oneway(
            rho, _group(args.alice), _group(args.bob), _group(args.charlie), cfg
        )
        return [_Row("ci-pure-one-way", est.value, _TAGS[est.direction])]

    if quantity == "ci-pure-reg":
        v = ci_pure_regularized(
            rho, _group(args.alice), _group(args.bob), _group(args.charlie)
        )
        return [_Row("ci-pure-regularized", v, "exact, closed form")]

    if quantity == "ci-product-reg":
        labels = layout.labels
        a = _group(args.alice) or (labels[0],)
        b1 = _group(args.bob1) or (labels[1],)
        b2 = _group(args.bob2) or (labels[2],)
        c = _group(args.charlie) or tuple(
            l for l in labels if l not in a + b1 + b2
        )
        band = ci_product_regularized(rho, a, b1, b2, c)
        if band.exact:
            return [_Row("ci-product-regularized", band.lower, "exact, closed form")]
        return [
            _Row("ci-product-regularized-lower", band.lower, "lower-est"),
            _Row("ci-product-regularized-upper", band.upper, "upper-est"),
        ]

    if quantity == "lqsm-bound":
        if args.ci_value is None:
            raise InvalidArgument("lqsm-bound requires --ci-value")
        a = _group(args.alice)
        v = lqsm_fidelity_lower(rho, args.ci_value, a)
        return [_Row("merge-fidelity-lower", v, "exact", unit="")]

    if quantity == "merge-check":
        labels = layout.labels
        b = _group(args.bob) or (labels[1],)
        c = _group(args.charlie) or tuple(
            l for l in labels if l not in b and l != labels[0]
        )
        res = merge_conditional_entropy_check(rho, b, c)
        row = _Row(
            f"S({_gname(b)}|{_gname(c)})", res.conditional_entropy, "exact"
        )
        verdict = "yes" if res.feasible else "no"
        return [row, f"mergeable-at-zero-cost: {verdict}"]

    if quantity == "monotone-check":
        a, b, c = resolve_tripartite(
            layout, _group(args.alice), _group(args.bob), _group(args.charlie)
        )
        res = monotone_necessary_check(rho, a, b, c)
        return [
            _Row(
                f"log-negativity({_gname(a + b)}:{_gname(c)})",
                res.helper_side,
                "exact",
            ),
            _Row(
                f"log-negativity({_gname(a)}:{_gname(b + c)})",
                res.reference_side,
                "exact",
            ),
            f"monotone-necessary-condition: {'yes' if res.passes else 'no'}",
        ]

    raise InvalidArgument(f"unknown quantity {quantity!r}")


def _cmd_compute(args) -> int:
    state, origin = _load_state(args)
    cfg = _config(args)
    rows = _compute_rows(args.quantity, state, args, cfg)
    lines = []
    if args.format == "text":
        lines.append(f"# ci-toolkit compute {args.quantity}")
        lines.append(f"# state: {state.layout.describe()} ({origin})")
        lines.append(
            f"# config: seed={cfg.seed} restarts={cfg.restarts} "
            f"tol={format(cfg.tol, 'g')} max-iters={cfg.max_iters}"
        )
        lines.extend(r.text() if isinstance(r, _Row) else r for r in rows)
    else:
        lines.append("name,value,direction")
        lines.extend(r.csv() for r in rows if isinstance(r, _Row))
    _emit(lines, args.out)
    return 0


def _cmd_verify(args) -> int:
    cfg = _config(args)
    results = run_suites(args.suite, cfg)
    lines = [
        f"# ci-toolkit verify {args.suite}",
        f"# config: seed={cfg.seed} restarts={cfg.restarts} "
        f"tol={format(cfg.tol, 'g')} max-iters={cfg.max_iters}",
    ]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.suite}/{r.name}: {r.detail}")
    passed = sum(1 for r in results if r.passed)
    lines.append(f"{passed}/{len(results)} checks passed")
    _emit(lines, args.out)
    return 0 if passed == len(results) else 1


def _sweep_rows(args, cfg):
    import numpy as np

    if args.steps < 1:
        raise InvalidArgument(f"--steps must be >= 1, got {args.steps}")
    params = np.linspace(args.start, args.stop, args.steps)
    rows = []
    for p in params:
        pval = float(p)
        ptext = format(pval, ".17g")
        if args.quantity == "entropy":
            state = preset(args.preset, (pval,))
            v = vn_entropy(
                state.to_mstate() if isinstance(state, PureState) else state
            )
            rows.append(f"{ptext},{format(v, '.17g')},,,exact,{cfg.seed}")
        elif args.quantity == "ci-bounds":
            state = preset(args.preset, (pval,))
            report = ci_lower(state, None, None, None, cfg)
            rows.append(
                f"{ptext},,{format(report.lower, '.17g')},"
                f"{format(report.upper, '.17g')},interval,{cfg.seed}"
            )
        else:  # oneway-gap
            if args.preset != "family15":
                raise InvalidArgument(
                    "oneway-gap sweeps are defined for the family15 preset only"
                )
            rep = family15_separation_report(pval, cfg)
            rows.append(
                f"{ptext},{format(rep.gap, '.17g')},,,upper-est,{cfg.seed}"
            )
    return rows


def _cmd_sweep(args) -> int:
    cfg = _config(args)
    lines = ["param,value,lower,upper,direction,seed"]
    lines.extend(_sweep_rows(args, cfg))
    _emit(lines, args.out)
    return 0


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=7, help="base seed for all randomness")
    p.add_argument("--restarts", type=int, default=32, help="optimizer restarts")
    p.add_argument("--tol", type=float, default=1e-6, help="optimizer step tolerance")
    p.add_argument("--max-iters", type=int, default=2000, help="optimizer iteration cap")
    p.add_argument("--out", default=None, help="write output to this path")
    p.add_argument(
        "--format", choices=("text", "csv"), default="text", help="output format"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ci-toolkit",
        description="Concentrated-information bounds on small multipartite states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("compute", help="compute one quantity on one state")
    pc.add_argument("quantity", choices=QUANTITIES)
    pc.add_argument("--state", help="JSON state file")
    pc.add_argument("--preset", help="named preset state")
    pc.add_argument(
        "--param", type=float, action="append", help="preset parameter (repeatable)"
    )
    for flag in ("--alice", "--bob", "--charlie", "--x", "--y", "--z", "--bob1", "--bob2"):
        pc.add_argument(flag, help="party group (comma-separated labels)")
    pc.add_argument("--ci-value", type=float, default=None, help="for lqsm-bound")
    _add_common_flags(pc)
    pc.set_defaults(func=_cmd_compute)

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("suite", choices=tuple(SUITES) + ("all",))
    _add_common_flags(pv)
    pv.set_defaults(func=_cmd_verify)

    ps = sub.add_parser("sweep", help="sweep a preset parameter, emit CSV")
    ps.add_argument("quantity", choices=SWEEP_QUANTITIES)
    ps.add_argument("--preset", default="family15", help="one-parameter preset")
    ps.add_argument("--start", type=float, required=True)
    ps.add_argument("--stop", type=float, required=True)
    ps.add_argument("--steps", type=int, required=True)
    _add_common_flags(ps)
    ps.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CAP_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"error: unknown name {exc}", file=sys.stderr)
        return 2
    except (InternalInvariantError, ObjectiveError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
