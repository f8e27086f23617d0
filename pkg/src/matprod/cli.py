"""Command-line front door: load system specs, run analyses, emit JSON/CSV.

Exit codes: 0 success, 1 analytic failure (condition (C) fails, form not
stabilized, certificates violated), 2 input error (bad spec, bad flags).
``MATPROD_THREADS`` caps the worker pool used for independent Monte-Carlo
trials; output order is independent of the pool size.

Output schemas are documented in docs/schemas.md and carry
``schema_version`` (JSON) or fixed headers (CSV).
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import click

from . import experiments, multifractal
from ._calibration import GROUP_SIZE
from .bernoulli import segmentation_for_word
from .core_linalg import Mat
from .limit_engine import ConditionCError, ConditionCReport, LimitReport, check_condition_C, estimate_limits
from .systems import SpecError, load_system_spec, factor_from_spec, bernoulli_generator_word
from .triangularization import TriangularizationError, TriangularForm, triangular_form

EXIT_OK = 0
EXIT_ANALYTIC = 1
EXIT_INPUT = 2

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------


def _scalar(x):
    """JSON-safe scalar: Fractions as 'p/q' strings, everything else as-is."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x


def _vector(v):
    return [_scalar(x) for x in v]


def _matrix(m: Mat):
    return [[_scalar(x) for x in row] for row in m.rows]


def _condition_c_json(cc: ConditionCReport) -> dict:
    return {
        "segmentation": list(cc.segmentation),
        "horizon": cc.horizon,
        "Lambda_bound": _scalar(cc.Lambda_bound),
        "lambda_bound": _scalar(cc.lambda_bound),
        "all_nested": cc.all_nested,
        "holds": cc.holds,
        "segments": [
            {
                "k": s.k,
                "start": s.start,
                "end": s.end,
                "nested_supports": s.nested_supports,
                "sup_Lambda": _scalar(s.sup_Lambda),
                "sup_lambda": _scalar(s.sup_lambda),
            }
            for s in cc.segments
        ],
    }


def _limit_report_json(rep: LimitReport) -> dict:
    last = max(rep.samples)
    return {
        "kappa": rep.kappa,
        "kappa_star": rep.kappa_star,
        "r_seg": rep.r_seg,
        "r0_seg": rep.r0_seg,
        "t0": rep.t0,
        "t1": rep.t1,
        "segmentation": list(rep.segmentation),
        "horizon": rep.horizon,
        "I_h": [sorted(s) for s in rep.I_h],
        "V_h": [list(v) for v in rep.V_h],
        "burn_in": rep.burn_in,
        "eps_n": {str(n): rep.eps_n[n] for n in sorted(rep.eps_n)},
        "sample_times": sorted(rep.samples),
        "final_classes": [list(c) for c in rep.samples[last].classes],
        "final_row_supports": [sorted(s) for s in rep.samples[last].row_supports],
        "invariant_violations": list(rep.invariant_violations),
        "stabilized": rep.stabilized,
    }


def _triangular_form_json(form: TriangularForm) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "r": form.r,
        "r0": form.r0,
        "rk": list(form.rk),
        "S": list(form.S.sigma),
        "cuts": list(form.cuts),
        "kappa": form.kappa,
        "stabilized": form.stabilized,
        "base_partition": {
            "d": form.base_partition.d,
            "I_h": [sorted(s) for s in form.base_partition.I_h],
            "J_h": [sorted(s) for s in form.base_partition.J_h],
            "c": list(form.base_partition.c),
        },
        "Tk": [_matrix(t) for t in form.Tk],
    }


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _worker_count(default: int = 4) -> int:
    raw = os.environ.get("MATPROD_THREADS")
    if raw is None:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


@click.group()
def main() -> None:
    """Analyze infinite products of nonnegative matrices."""


def _load(spec_path: str):
    try:
        return load_system_spec(spec_path)
    except SpecError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_INPUT)


def _resolve_segmentation(spec, segmentation: str | None, horizon: int) -> list[int]:
    if segmentation:
        try:
            cuts = [int(x) for x in segmentation.replace(",", " ").split()]
        except ValueError:
            click.echo(f"error: --segmentation must be integers, got {segmentation!r}", err=True)
            sys.exit(EXIT_INPUT)
        if not cuts or any(b <= a for a, b in zip(cuts, cuts[1:])):
            click.echo("error: --segmentation must be strictly increasing", err=True)
            sys.exit(EXIT_INPUT)
        return cuts
    if spec.sequence.get("generator") == "bernoulli-beta3":
        letters = bernoulli_generator_word(horizon)
        word = "".join(str(a) for a in letters)
        return list(segmentation_for_word(word, GROUP_SIZE))
    step = max(2, horizon // 40)
    return list(range(0, horizon + 1, step))


@main.command()
@click.argument("spec_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--segmentation", default=None, help="Comma-separated cut points (default: built-in rule).")
@click.option("--horizon", default=1000, show_default=True, type=int)
@click.option("--out", default=None, type=click.Path(dir_okay=False), help="Write JSON here (default stdout).")
def analyze(spec_path: str, segmentation: str | None, horizon: int, out: str | None) -> None:
    """Check condition (C) and estimate limit structure for SPEC_PATH."""
    spec = _load(spec_path)
    if spec.sequence.get("word") is not None:
        horizon = min(horizon, len(spec.sequence["word"]))
    factor = factor_from_spec(spec, backend="float")
    cuts = _resolve_segmentation(spec, segmentation, horizon)

    doc: dict = {"schema_version": SCHEMA_VERSION, "horizon": horizon}
    code = EXIT_OK
    try:
        rep = estimate_limits(factor, cuts, horizon)
        doc["condition_c"] = _condition_c_json(rep.condition_c)
        doc["limit_report"] = _limit_report_json(rep)
        if not rep.stabilized or rep.invariant_violations:
            code = EXIT_ANALYTIC
    except ConditionCError as e:
        doc["condition_c"] = _condition_c_json(e.report)
        doc["error"] = "condition (C) fails"
        code = EXIT_ANALYTIC
    except ValueError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", out)
    sys.exit(code)


@main.command()
@click.argument("spec_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--horizon", default=200, show_default=True, type=int)
@click.option("--blocks", default=3, show_default=True, type=int, help="Triangular blocks to emit.")
@click.option("--out", default=None, type=click.Path(dir_okay=False))
def triangularize(spec_path: str, horizon: int, blocks: int, out: str | None) -> None:
    """Emit the block-triangular form of the product window for SPEC_PATH."""
    spec = _load(spec_path)
    if spec.sequence.get("word") is not None:
        horizon = min(horizon, len(spec.sequence["word"]))
    backend = "exact" if spec.exact else "float"
    factor = factor_from_spec(spec, backend=backend)
    try:
        form = triangular_form(factor, horizon, k_count=blocks)
    except TriangularizationError as e:
        _emit(json.dumps({"schema_version": SCHEMA_VERSION, "error": str(e)}, indent=2, sort_keys=True) + "\n", out)
        sys.exit(EXIT_ANALYTIC)
    except ValueError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    _emit(json.dumps(_triangular_form_json(form), indent=2, sort_keys=True) + "\n", out)
    sys.exit(EXIT_OK if form.stabilized else EXIT_ANALYTIC)


@main.command()
@click.option("--generation", default=12, show_default=True, type=int)
@click.option("--qmin", default=-5.0, show_default=True, type=float)
@click.option("--qmax", default=5.0, show_default=True, type=float)
@click.option("--qstep", default=0.25, show_default=True, type=float)
@click.option("--out", default=None, type=click.Path(dir_okay=False))
def spectrum(generation: int, qmin: float, qmax: float, qstep: float, out: str | None) -> None:
    """Scale-exponent estimate and Legendre transform for the built-in measure."""
    if generation < 2 or generation > 16:
        click.echo(f"error: --generation must be in 2..16, got {generation}", err=True)
        sys.exit(EXIT_INPUT)
    if qstep <= 0 or qmax < qmin:
        click.echo("error: need qstep > 0 and qmax >= qmin", err=True)
        sys.exit(EXIT_INPUT)
    count = int(round((qmax - qmin) / qstep)) + 1
    if count < 2:
        click.echo("error: q grid must contain at least two points", err=True)
        sys.exit(EXIT_INPUT)
    q_grid = tuple(qmin + i * qstep for i in range(count))
    est = multifractal.tau_scale_estimate(q_grid, n=generation)
    points = multifractal.legendre(est)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["q", "tau"])
    for q, t in zip(est.q_grid, est.tau_values):
        w.writerow([repr(float(q)), repr(float(t))])
    w.writerow(["alpha", "f"])
    for p in points:
        w.writerow([repr(p.alpha), repr(p.f)])
    _emit(buf.getvalue(), out)
    sys.exit(EXIT_OK)


def _run_bistochastic(n_max: int, w) -> None:
    w.writerow(["n", "s", "det", "step"])
    for n in range(1, n_max + 1):
        s, det, _p = experiments.bistochastic_chain(n)
        w.writerow([n, _scalar(s), _scalar(det), _scalar(experiments.bistochastic_step(n))])


def _run_div3x3(k_max: int, w) -> None:
    w.writerow(["k", "n_first", "ratio_first", "n_second", "ratio_second"])
    for k in range(1, k_max + 1):
        r = experiments.divergence_3x3(k)
        w.writerow([k, r.n_first, _scalar(r.ratio_first), r.n_second, _scalar(r.ratio_second)])


def _run_tri2x2(n: int, w) -> None:
    w.writerow(["scenario", "a", "c", "d", "n", "x", "y", "limit_x", "limit_y"])
    presets = [
        ("divergent-sum", Fraction(1), Fraction(1), Fraction(1)),
        ("convergent-sum", Fraction(2), Fraction(1), Fraction(1)),
    ]
    v = (Fraction(1), Fraction(1))
    for name, a, c, d in presets:
        r = experiments.triangular_2x2(lambda k: a, lambda k: c, lambda k: d, v, n)
        lim = r.limit if r.limit is not None else ("", "")
        w.writerow(
            [name, _scalar(a), _scalar(c), _scalar(d), n,
             repr(float(r.direction[0])), repr(float(r.direction[1])),
             _scalar(lim[0]), _scalar(lim[1])]
        )


def _run_montecarlo(trials: int, n: int, seed: int, w) -> None:
    w.writerow(["ensemble", "trial", "seed", "n", "d", "rank1_gap", "max_successive_last50", "reseeds"])
    jobs = [
        (ens, t, seed + t)
        for ens in ("uniform-positive", "gaussian-complex")
        for t in range(trials)
    ]
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        records = list(pool.map(lambda j: experiments.random_divergence_trial(j[0], n, j[2]), jobs))
    for (ens, t, s), rec in zip(jobs, records):
        w.writerow([ens, t, s, rec.n, rec.d, repr(rec.rank1_gap), repr(rec.max_successive_last50), rec.reseeds])


@main.command("experiments")
@click.argument("name", type=click.Choice(["bistochastic", "div3x3", "tri2x2", "montecarlo"]))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--n", default=None, type=int, help="Horizon (tri2x2, montecarlo) or max index (bistochastic).")
@click.option("--k-max", default=12, show_default=True, type=int, help="div3x3 only.")
@click.option("--trials", default=100, show_default=True, type=int, help="montecarlo only.")
@click.option("--out", default=None, type=click.Path(dir_okay=False))
def experiments_cmd(name: str, seed: int, n: int | None, k_max: int, trials: int, out: str | None) -> None:
    """Run a named deterministic experiment and emit CSV."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if name == "bistochastic":
        _run_bistochastic(n or 20, w)
    elif name == "div3x3":
        _run_div3x3(k_max, w)
    elif name == "tri2x2":
        _run_tri2x2(n or 1000, w)
    else:
        _run_montecarlo(trials, n or 100, seed, w)
    _emit(buf.getvalue(), out)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
