"""Command-line front end.

Subcommands: ``gap``, ``pressure``, ``measure``, ``cylinder``, ``weakgibbs``,
``lemma``, ``tangent``, ``splice``, ``factor``.  Output is deterministic TSV
(tab separators, newline line endings, reals with 15 significant digits).
Exit status: 0 success, 2 validation or parse error, 3 volume-guard refusal.
"""

from __future__ import annotations

import argparse
import random
import sys

from .exceptions import ValidationError, VolumeGuardError
from .fileio import load_potential, load_shift, dump_presentation
from .measures import cylinder_prob, equilibrium_measure
from .potentials import Potential
from .pressure import pressure_limit
from .shifts import (BlockCode, SoficPresentation, Word, decoupling_gap,
                     enumerate_words, factor_gap_bound, factor_presentation,
                     point_from_words, splice)
from .verify import (decoupling_1d_check, lemma_211_check, lemma_212_check,
                     tangent_derivative_check, weak_gibbs_scan)


def _fmt(x: float) -> str:
    return f"{x:.15g}"


def _load(args) -> tuple[SoficPresentation, Potential | None]:
    presentation = load_shift(args.shift)
    potential = None
    if getattr(args, "potential", None):
        potential = load_potential(args.potential, presentation.alphabet)
    return presentation, potential


def _parse_m_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",")]


def _word(presentation: SoficPresentation, text: str) -> Word:
    letters = presentation.alphabet.parse(text)
    m = len(letters) // 2
    return Word(presentation.alphabet, -m, letters)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_gap(args) -> str:
    presentation, _ = _load(args)
    cert = decoupling_gap(presentation, args.variant)
    return f"q\t{cert.gap}\n"


def _cmd_pressure(args) -> str:
    presentation, potential = _load(args)
    ladder = tuple(range(1, args.n_max + 1))
    estimate = pressure_limit(presentation, potential, ladder)
    lines = ["n\tP_n\tenvelope"]
    for (n, p_n, env) in estimate.finite_volume:
        lines.append(f"{n}\t{_fmt(p_n)}\t{_fmt(env)}")
    lines.append(f"lambda\t{_fmt(estimate.log_lambda)}")
    return "\n".join(lines) + "\n"


def _cmd_measure(args) -> str:
    presentation, potential = _load(args)
    measure = equilibrium_measure(presentation, potential)
    lines = [f"lambda\t{_fmt(measure.log_lambda)}"]
    for i, _state in enumerate(measure.transfer.states):
        lines.append(f"state\t{i}\t{measure.transfer.state_name(i)}\t"
                     f"{_fmt(float(measure.stationary[i]))}")
    q = measure.q_by_symbol
    for a in range(q.shape[0]):
        sym = presentation.alphabet.symbols[a]
        for i in range(q.shape[1]):
            for k in range(q.shape[2]):
                if q[a, i, k] > 0:
                    lines.append(f"trans\t{i}\t{k}\t{sym}\t{_fmt(float(q[a, i, k]))}")
    return "\n".join(lines) + "\n"


def _cmd_cylinder(args) -> str:
    presentation, potential = _load(args)
    measure = equilibrium_measure(presentation, potential)
    word = _word(presentation, args.word)
    return _fmt(cylinder_prob(measure, word)) + "\n"


def _cmd_weakgibbs(args) -> str:
    presentation, potential = _load(args)
    measure = equilibrium_measure(presentation, potential)
    m_list = _parse_m_range(args.m)
    report = weak_gibbs_scan(measure, potential, measure.log_lambda, m_list,
                             cap=args.cap)
    lines = ["m\tD_m\tbound"]
    for (m, d, bound) in report.rows:
        lines.append(f"{m}\t{_fmt(d)}\t{_fmt(bound)}")
    if args.delta:
        for delta in (float(t) for t in args.delta.split(",")):
            n_delta = report.delta_to_n(delta)
            lines.append(f"delta\t{_fmt(delta)}\t"
                         f"{n_delta if n_delta is not None else 'NA'}")
    return "\n".join(lines) + "\n"


def _report_lines(report, header: str | None = None) -> list[str]:
    lines = []
    if header:
        lines.append(f"# {header}")
    for rec in report.inequalities:
        lines.append(f"{rec.name}\t{_fmt(rec.lhs)}\t{_fmt(rec.rhs)}\t"
                     f"{'true' if rec.holds else 'false'}")
    return lines


def _center_words(presentation: SoficPresentation, m: int) -> list[Word]:
    return enumerate_words(presentation, m)


def _cmd_lemma(args) -> str:
    presentation, potential = _load(args)
    lines = ["name\tlhs\trhs\tholds"]
    if args.which == "211":
        q = decoupling_gap(presentation, "bounded-length").gap
        words = enumerate_words(presentation, args.n, cap=args.cap)
        rng = random.Random(args.seed)
        by_exterior: dict[tuple, list[Word]] = {}
        for w in words:
            key = tuple(a for k, a in zip(range(-args.n, args.n + 1), w.letters)
                        if abs(k - args.j) > args.m + q)
            by_exterior.setdefault(key, []).append(w)
        groups = [g for g in by_exterior.values() if len(g) >= 2]
        if not groups:
            raise ValidationError("no word pairs share an exterior at these windows")
        for i in range(args.count):
            group = groups[rng.randrange(len(groups))]
            x, y = rng.sample(group, 2)
            ell, ell_p = rng.randint(-q, q), rng.randint(-q, q)
            report = lemma_211_check(presentation, potential, args.n, args.m, q,
                                     args.j, ell, ell_p, x, y)
            lines.extend(_report_lines(report, f"pair {i} ell={ell} ell'={ell_p}"))
        return "\n".join(lines) + "\n"

    check = lemma_212_check if args.which == "212" else decoupling_1d_check
    if args.u:
        targets = [_word(presentation, args.u)]
    else:
        targets = _center_words(presentation, args.m)
    for u_bar in targets:
        if args.which == "1d":
            report = check(presentation, potential, args.n, args.m, args.j, u_bar,
                           q_bar=args.q_bar, cap=args.cap)
        else:
            report = check(presentation, potential, args.n, args.m, args.j, u_bar,
                           cap=args.cap)
        lines.extend(_report_lines(report, f"u={u_bar.text()}"))
    return "\n".join(lines) + "\n"


def _cmd_tangent(args) -> str:
    presentation, potential = _load(args)
    word = _word(presentation, args.word)
    finite_diff, formula, cylinder_value = tangent_derivative_check(
        presentation, potential, word, args.n, args.t_step, cap=args.cap)
    return (f"finite_diff\t{_fmt(finite_diff)}\n"
            f"formula\t{_fmt(formula)}\n"
            f"cylinder\t{_fmt(cylinder_value)}\n")


def _cmd_splice(args) -> str:
    presentation, _ = _load(args)
    def periodic(text: str):
        letters = presentation.alphabet.parse(text)
        return point_from_words(presentation, letters, (), letters)
    x_minus = periodic(args.left)
    y = periodic(args.center)
    x_plus = periodic(args.right)
    z, l_minus, l_plus = splice(presentation, x_minus, y, x_plus, args.m)
    window = args.window
    zw = z.word(-window, window)
    return (f"l_minus\t{l_minus}\n"
            f"l_plus\t{l_plus}\n"
            f"z[{-window},{window}]\t{zw.text()}\n")


def _cmd_factor(args) -> str:
    presentation, _ = _load(args)
    table: dict[tuple[int, ...], int] = {}
    target = presentation.alphabet
    if args.rule:
        for item in args.rule.split(","):
            pattern_text, _, sym = item.partition("=")
            if not sym:
                raise ValidationError(f"bad rule item {item!r}; want pattern=symbol")
            pattern = target.parse(pattern_text)
            if len(pattern) != 2 * args.k + 1:
                raise ValidationError(
                    f"rule pattern {pattern_text!r} must cover the full "
                    f"window of {2 * args.k + 1} letters")
            table[pattern] = target.index(sym)
    default = target.index(args.default) if args.default is not None else None
    code = BlockCode.from_table(args.k, target, table, default)
    image = factor_presentation(presentation, code)
    source_gap = decoupling_gap(presentation, "bounded-length")
    image_gap = decoupling_gap(image, "bounded-length")
    lines = [f"gap_bound\t{factor_gap_bound(source_gap, args.k)}",
             f"image_gap\t{image_gap.gap}"]
    if args.dump:
        lines.append(dump_presentation(image).rstrip("\n"))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftgibbs",
        description="Pressure, equilibrium measures, and weak-Gibbs "
                    "certificates for sofic shift spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, potential=True):
        p.add_argument("--shift", required=True, help="presentation or .sft file")
        if potential:
            p.add_argument("--potential", required=True, help="potential file")
        p.add_argument("--cap", type=int, default=None,
                       help="enumeration cap override (default 2e6 or "
                            "SHIFTGIBBS_ENUM_CAP)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap; output is identical for any value")
        p.add_argument("--out", default=None, help="write the report here")

    p = sub.add_parser("gap", help="decoupling gap certificate")
    common(p, potential=False)
    p.add_argument("--variant", choices=("bounded-length", "exact-length"),
                   default="bounded-length")
    p.set_defaults(fn=_cmd_gap)

    p = sub.add_parser("pressure", help="finite-volume pressure ladder and log Perron root")
    common(p)
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(fn=_cmd_pressure)

    p = sub.add_parser("measure", help="equilibrium chain: states, stationary law, transitions")
    common(p)
    p.set_defaults(fn=_cmd_measure)

    p = sub.add_parser("cylinder", help="cylinder probability of a word")
    common(p)
    p.add_argument("--word", required=True)
    p.set_defaults(fn=_cmd_cylinder)

    p = sub.add_parser("weakgibbs", help="weak-Gibbs deviation scan")
    common(p)
    p.add_argument("--m", required=True, help="window list: 1..10 or 1,2,5")
    p.add_argument("--delta", default=None, help="comma list of deviation targets")
    p.set_defaults(fn=_cmd_weakgibbs)

    p = sub.add_parser("lemma", help="lemma inequality suites")
    common(p)
    p.add_argument("--which", choices=("211", "212", "1d"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--u", default=None, help="center word (default: all)")
    p.add_argument("--q-bar", type=int, default=None,
                   help="override the 1-decoupling gap (1d only)")
    p.add_argument("--seed", type=int, default=0, help="211 pair sampling seed")
    p.add_argument("--count", type=int, default=10, help="211 pair count")
    p.set_defaults(fn=_cmd_lemma)

    p = sub.add_parser("tangent", help="derivative identity cross-check")
    common(p)
    p.add_argument("--word", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t-step", type=float, default=1e-3)
    p.set_defaults(fn=_cmd_tangent)

    p = sub.add_parser("splice", help="splice periodic points through the graph")
    common(p, potential=False)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--left", required=True, help="periodic word for the left point")
    p.add_argument("--center", required=True, help="periodic word for the center point")
    p.add_argument("--right", required=True, help="periodic word for the right point")
    p.add_argument("--window", type=int, default=12)
    p.set_defaults(fn=_cmd_splice)

    p = sub.add_parser("factor", help="image presentation under a sliding-block code")
    common(p, potential=False)
    p.add_argument("--k", type=int, required=True, help="code radius")
    p.add_argument("--rule", default=None, help="comma list pattern=symbol")
    p.add_argument("--default", default=None, help="fallback output symbol")
    p.add_argument("--dump", action="store_true",
                   help="print the image presentation file")
    p.set_defaults(fn=_cmd_factor)

    return parser


def _validate_numeric(args) -> None:
    for name in ("n", "m", "n_max", "k", "window", "count", "cap", "threads",
                 "q_bar"):
        value = getattr(args, name, None)
        if isinstance(value, int) and value < 0:
            raise ValidationError(f"--{name.replace('_', '-')} must be nonnegative")
    if getattr(args, "t_step", None) is not None and args.t_step <= 0:
        raise ValidationError("--t-step must be positive")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate_numeric(args)
        text = args.fn(args)
    except VolumeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
