"""Command line entry point.

Every command writes versioned JSON (or CSV / ndjson where noted) to stdout
or to ``--out``.  Exit status is 0 on success, 2 when a search hits its node
budget (partial output is still written), and 1 on any other error.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import random
import re
import sys
from fractions import Fraction
from typing import Optional

import click

from . import gausscantor as gc
from . import spectra
from .errors import Markov3Error, ParseError, ResourceLimit
from .exactnum import CertifiedReal, ExpThreshold, QuadraticSurd
from .renorm import length_at_least, pair_budget, renorm_until
from .words import Section, lambda_bounds, markov_value_periodic

SCHEMA_VERSION = 1

# ---------------------------------------------------------------------------
# bound expressions

_RATIONAL = re.compile(r"\s*([+-]?\d+(?:/\d+|\.\d+)?)\s*")
_TAIL = re.compile(r"\s*([+-])\s*(e|\d+)\s*\^\s*-\s*(\d+)\s*$")
_RATIONAL_TAIL = re.compile(r"\s*([+-])\s*(\d+(?:/\d+|\.\d+)?)\s*$")


def parse_bound(expr: str):
    """rational | BASE+e^-R | BASE+B^-N | BASE-B^-N | BASE+-rational.

    ``B^-N`` terms are folded into an exact rational; ``e^-R`` becomes an
    :class:`ExpThreshold` compared by refinement.
    """
    if not isinstance(expr, str) or not expr.strip():
        raise ParseError("empty bound expression", 0)
    m = _RATIONAL.match(expr)
    if not m:
        raise ParseError(f"expected a rational at position 0 in {expr!r}", 0)
    try:
        base = Fraction(m.group(1))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {m.group(1)!r}", m.start(1)) from None
    rest = expr[m.end():]
    if not rest.strip():
        return base
    t = _TAIL.match(rest)
    if not t:
        q = _RATIONAL_TAIL.match(rest)
        if q:
            sign = 1 if q.group(1) == "+" else -1
            try:
                return base + sign * Fraction(q.group(2))
            except ZeroDivisionError:
                raise ParseError(f"bad rational {q.group(2)!r}", m.end() + q.start(2)) from None
        raise ParseError(f"unexpected text at position {m.end()} in {expr!r}", m.end())
    sign = 1 if t.group(1) == "+" else -1
    exponent = int(t.group(3))
    if t.group(2) == "e":
        if exponent == 0:
            return base + sign
        return ExpThreshold(base, sign, exponent)
    B = int(t.group(2))
    if B < 2:
        raise ParseError("base of B^-N must be at least 2", m.end() + t.start(2))
    return base + sign * Fraction(1, B ** exponent)


def bound_to_json(t):
    return spectra._bound_json(t)


def _surd_json(x: QuadraticSurd) -> dict:
    return {"exact": x.to_json(), "text": str(x), "approx": repr(float(x))}


def _certified_json(x: CertifiedReal) -> dict:
    return {**x.to_json(), "approx": repr(float(x.mid))}


# ---------------------------------------------------------------------------
# output plumbing

class Output:
    def __init__(self, path: Optional[str]):
        self.path = path

    def write(self, text: str) -> None:
        if self.path in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=2) + "\n"


def _envelope(command: str, payload: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, **payload}


def _emit(ctx, command: str, payload: dict) -> None:
    ctx.obj["out"].write(_dump(_envelope(command, payload)))


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def _bound_option(ctx, param, value):
    if value is None:
        return None
    try:
        return parse_bound(value)
    except ParseError as exc:
        raise click.BadParameter(str(exc)) from None


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


# ---------------------------------------------------------------------------
# commands

def _clear_budget() -> None:
    spectra._budget_override = None


@click.group()
@click.option("--out", "out_path", default=None, help="Write output here instead of stdout.")
@click.option("--seed", default=0, show_default=True, type=int, help="Seed for sampled checks.")
@click.option("--threads", default=1, show_default=True, type=click.IntRange(min=1), help="Parallelism cap.")
@click.option("--node-budget", default=None, type=click.IntRange(min=1), help="Search node budget.")
@click.pass_context
def main(ctx, out_path, seed, threads, node_budget):
    """Markov and Lagrange spectra near 3."""
    random.seed(seed)
    # the environment variable outranks the flag
    if node_budget is not None and not os.environ.get("SPECTRA_NODE_BUDGET"):
        spectra._budget_override = node_budget
        ctx.call_on_close(_clear_budget)
    ctx.obj = {"out": Output(out_path), "seed": seed, "threads": threads}


@main.command("markov-value")
@click.option("--period", required=True, help="Period over {1, 2}, e.g. 2211.")
@click.pass_context
def markov_value_cmd(ctx, period):
    value, arg = markov_value_periodic(period)
    _emit(ctx, "markov-value", {"period": period, "value": _surd_json(value), "argmax_cut": arg})


@main.command("lambda-bounds")
@click.option("--section", required=True, help="Finite section with one bar, e.g. 1|21.")
@click.pass_context
def lambda_bounds_cmd(ctx, section):
    try:
        s = Section.parse(section)
    except ValueError as exc:
        raise ParseError(str(exc), section.find("|")) from None
    lo, hi = lambda_bounds(s)
    _emit(ctx, "lambda-bounds", {"section": str(s), "lo": _surd_json(lo), "hi": _surd_json(hi)})


@main.command("enumerate")
@click.option("--t", "t", required=True, callback=_bound_option, help='Bound, e.g. "3+216^-4".')
@click.option("--n", type=click.IntRange(min=1), required=True)
@click.option("--depth", type=click.IntRange(min=0), default=8, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["ndjson", "json"]), default="ndjson", show_default=True)
@click.pass_context
def enumerate_cmd(ctx, t, n, depth, fmt):
    s = spectra.enumerate_sigma(t, n, depth)
    if fmt == "json":
        _emit(ctx, "enumerate", s.to_json())
        return
    lines = [json.dumps({"schema_version": SCHEMA_VERSION, "t": bound_to_json(t), "n": n, "depth": depth}, sort_keys=True)]
    for w in s.certified:
        lines.append(json.dumps({"word": w, "status": spectra.IN, "witness": s.witnesses[w]}, sort_keys=True))
    for w in s.unknown:
        lines.append(json.dumps({"word": w, "status": spectra.UNKNOWN}, sort_keys=True))
    ctx.obj["out"].write("\n".join(lines) + "\n")


@main.command("verify-thm-1-1")
@click.option("--n", type=click.IntRange(min=1), required=True)
@click.option("--B", "B", type=click.IntRange(min=2), default=216, show_default=True)
@click.option("--depth", type=click.IntRange(min=0), default=8, show_default=True)
@click.pass_context
def verify_cmd(ctx, n, B, depth):
    report = spectra.verify_theorem_equalities(n, B, depth)
    report.pop("schema_version", None)
    _emit(ctx, "verify-thm-1-1", report)


@main.command("renormalize")
@click.option("--word", required=True, help="Digit word over {1, 2}.")
@click.option("--length", "length", type=click.IntRange(min=1), default=None, help="Stop once |alpha beta| >= this (digits).")
@click.option("--r", "r", type=click.IntRange(min=1), default=None, help="Stop once 6 |alpha beta| >= r.")
@click.pass_context
def renormalize_cmd(ctx, word, length, r):
    if length is None and r is None:
        raise click.UsageError("give --length or --r")
    target = length_at_least(length) if length is not None else pair_budget(r)
    pair, d, trace = renorm_until(word, target, budget_r=r)
    _emit(
        ctx,
        "renormalize",
        {"word": word, "pair": pair.to_json(), "final": d.to_json(), "trace": [x.to_json() for x in trace]},
    )


@main.command("qr-words")
@click.option("--r", "r", type=click.IntRange(min=1), required=True)
@click.option("--t", "t", required=True, callback=_bound_option)
@click.option("--depth", type=click.IntRange(min=0), default=2, show_default=True)
@click.pass_context
def qr_words_cmd(ctx, r, t, depth):
    words = spectra.q_r_words(r, t, depth, classified=True)
    _emit(
        ctx,
        "qr-words",
        {"r": r, "t": bound_to_json(t), "depth": depth, "count": len(words), "words": [{"word": w, "status": s} for w, s in words.items()]},
    )


@main.command("covering")
@click.option("--t", "t", required=True, callback=_bound_option)
@click.option("--r-grid", "r_grid", required=True, help="Comma list or a..b range of r values.")
@click.option("--depth", type=click.IntRange(min=0), default=2, show_default=True)
@click.pass_context
def covering_cmd(ctx, t, r_grid, depth):
    """CSV: r, count, unknown, estimate, reference 2(log r - log log r)/r."""
    rows = []
    for r in _int_list(r_grid):
        rep = spectra.covering_estimate(t, r, depth)
        ref = 2 * (math.log(r) - math.log(math.log(r))) / r if r >= 3 else ""
        rows.append([r, rep.count, rep.unknown, repr(float(rep.estimate.mid)), ref if ref == "" else repr(ref)])
    ctx.obj["out"].write(_csv(rows, ["r", "count", "unknown", "estimate", "reference"]))


@main.command("comb")
@click.option("--U", "U", type=click.IntRange(min=1), required=True)
@click.option("--m", "m", required=True, help="Positive rational.")
@click.pass_context
def comb_cmd(ctx, U, m):
    mq = Fraction(m)
    brute = spectra.comb_brute(U, mq)
    bound = spectra.comb_bound(U, mq)
    _emit(ctx, "comb", {"U": U, "m": str(mq), "brute": brute, "bound": _certified_json(bound), "holds": brute <= bound.lo})


@main.command("gap")
@click.option("--k", "k", type=click.IntRange(min=1), required=True)
@click.option("--j-max", "j_max", type=click.IntRange(min=0), default=8, show_default=True)
@click.option("--s", "s", type=click.IntRange(min=0), default=60, show_default=True)
@click.option("--neighbours", is_flag=True, help="Also scan the families at k-1 and k+1.")
@click.pass_context
def gap_cmd(ctx, k, j_max, s, neighbours):
    rep = spectra.gap_emptiness(k, j_max, s, neighbours=neighbours)
    ends = rep.pop("endpoints")
    rows = [
        {
            "k": row["k"],
            "case": row["case"],
            "j": row["j"],
            "value": _surd_json(row["value"]),
            "scaled": repr(row["scaled"]),
            "side": row["side"],
            "margin": repr(float(row["margin"])),
        }
        for row in rep.pop("rows")
    ]
    _emit(ctx, "gap", {**rep, "endpoints": ends.to_json(), "rows": rows})


@main.group("dim")
def dim_group():
    """Dimension brackets and asymptotics."""


def _tol(text: str) -> Fraction:
    tol = Fraction(text)
    if not 0 < tol < 1:
        raise click.BadParameter("tol must lie in (0, 1)")
    return tol


@dim_group.command("bracket")
@click.option("--blocks", required=True, help="Comma-separated blocks, e.g. 221,1.")
@click.option("--tol", default="1e-12", show_default=True)
@click.option("--square", is_flag=True, help="Also bracket the alphabet of two-block words.")
@click.pass_context
def dim_bracket_cmd(ctx, blocks, tol, square):
    B = gc.GaussAlphabet([b.strip() for b in blocks.split(",") if b.strip()])
    br = gc.dimension_bracket(B, _tol(tol))
    payload = {"blocks": list(B.blocks), "bracket": br.to_json(), "lo": repr(float(br.lo)), "hi": repr(float(br.hi))}
    if square:
        br2 = gc.dimension_bracket(gc.square_alphabet(B), _tol(tol))
        payload["square_bracket"] = br2.to_json()
        payload["nested"] = br2.nested_in(br)
    _emit(ctx, "dim bracket", payload)


@dim_group.command("dtilde")
@click.option("--r-grid", "r_grid", default="50,100,200,500,1000", show_default=True)
@click.option("--tol", default="1e-12", show_default=True)
@click.option("--covering-depth", type=int, default=None, help="Also fill the covering_estimate column.")
@click.pass_context
def dim_dtilde_cmd(ctx, r_grid, tol, covering_depth):
    """CSV: r, d_tilde, lower_formula, W_formula, covering_estimate."""
    c = float(gc.c0().mid)
    rows = []
    for r in _int_list(r_grid):
        d = float(gc.d_tilde(r, _tol(tol)).mid)
        lower = (math.log(r) - math.log(math.log(r)) + c) / r
        g1, _ = gc.asymptotic_d_from_log(r)
        cov = ""
        if covering_depth is not None:
            cov = repr(float(spectra.covering_estimate(ExpThreshold(Fraction(3), 1, r), r, covering_depth).estimate.mid))
        # g1 / 2 = W(r e^{c0}) / r
        rows.append([r, repr(d), repr(lower), repr(float(g1.mid) / 2), cov])
    ctx.obj["out"].write(_csv(rows, ["r", "d_tilde", "lower_formula", "W_formula", "covering_estimate"]))


@dim_group.command("asymptotic")
@click.option("--eps", required=True, help="e^-R or a rational in (0, 1/e).")
@click.pass_context
def dim_asymptotic_cmd(ctx, eps):
    m = re.fullmatch(r"\s*e\s*\^\s*-\s*(\d+)\s*", eps)
    if m:
        g1, g2 = gc.asymptotic_d_from_log(int(m.group(1)))
    else:
        try:
            q = Fraction(eps)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad eps {eps!r}", 0) from None
        g1, g2 = gc.asymptotic_d(q)
    _emit(ctx, "dim asymptotic", {"eps": eps, "g1": _certified_json(g1), "g2": _certified_json(g2)})


def run(argv=None) -> int:
    """Invoke the CLI and map errors to exit codes."""
    try:
        main.main(args=argv, prog_name="spectra", standalone_mode=False)
    except ResourceLimit as exc:
        partial = exc.partial if isinstance(exc.partial, (dict, list)) else {}
        sys.stdout.write(_dump({"schema_version": SCHEMA_VERSION, "error": exc.code, "message": str(exc), "partial": partial}))
        return 2
    except Markov3Error as exc:
        err = {"schema_version": SCHEMA_VERSION, "error": exc.code, "message": str(exc)}
        if isinstance(exc, ParseError):
            err["position"] = exc.position
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 1
    except ValueError as exc:
        sys.stderr.write(json.dumps({"schema_version": SCHEMA_VERSION, "error": "invalid_input", "message": str(exc)}, sort_keys=True) + "\n")
        return 1
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        return 1
    return 0


def entry() -> None:
    sys.exit(run())


if __name__ == "__main__":
    entry()
