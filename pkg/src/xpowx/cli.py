"""Command-line front end.

Every run that writes files also writes a JSON manifest next to its
first output (subcommand, canonical parameters, tool version, timestamp,
output paths); ``xpowx replay manifest.json`` re-executes it and, seeds
included, reproduces the outputs byte for byte. Range scans are cached
as JSONL under $XPOWX_CACHE_DIR (default ~/.cache/xpowx) keyed by the
canonical parameters.

Exit codes: 0 success, 2 usage error, 3 domain/precondition error,
4 budget refusal.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import click

from . import __version__, fhstats, linforms, multind, nset, psimap
from .errors import BudgetError, ConfigError, DomainError, UndefinedScoreError

EXIT_DOMAIN = 3
EXIT_BUDGET = 4


class _DomainExit(click.ClickException):
    exit_code = EXIT_DOMAIN


class _BudgetExit(click.ClickException):
    exit_code = EXIT_BUDGET


def _trap(fn):
    """Map library errors onto the documented exit codes."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BudgetError as e:
            raise _BudgetExit(str(e)) from e
        except (DomainError, ConfigError, UndefinedScoreError) as e:
            raise _DomainExit(str(e)) from e

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# --- manifests and cache ------------------------------------------------------


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    version: str
    timestamp: str
    outputs: list[str]


def _write_manifest(subcommand: str, parameters: dict, outputs: list[str]) -> None:
    if not outputs:
        return
    manifest = RunManifest(
        subcommand=subcommand,
        parameters=parameters,
        version=__version__,
        timestamp=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        outputs=[str(Path(o)) for o in outputs],
    )
    path = Path(outputs[0]).with_suffix(Path(outputs[0]).suffix + ".manifest.json")
    path.write_text(json.dumps(asdict(manifest), indent=2, sort_keys=True) + "\n")


def _cache_dir() -> Path:
    root = os.environ.get("XPOWX_CACHE_DIR")
    if root:
        return Path(root)
    return Path.home() / ".cache" / "xpowx"


def _cache_key(subcommand: str, parameters: dict) -> str:
    canon = json.dumps(
        {"subcommand": subcommand, "parameters": parameters, "version": __version__},
        sort_keys=True,
    )
    return hashlib.sha256(canon.encode()).hexdigest()[:24]


def _cache_load(key: str) -> list[dict] | None:
    path = _cache_dir() / f"{key}.jsonl"
    if not path.exists():
        return None
    return [json.loads(line) for line in path.read_text().splitlines() if line]


def _cache_store(key: str, rows: list[dict]) -> None:
    root = _cache_dir()
    root.mkdir(parents=True, exist_ok=True)
    tmp = root / f"{key}.jsonl.tmp"
    with tmp.open("w") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    tmp.replace(root / f"{key}.jsonl")


# --- command cores (shared by the CLI and replay) ------------------------------


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise click.UsageError(f"range must look like 'lo..hi' (got {text!r})")


@_trap
def _run_fixed_points(params: dict) -> list[str]:
    outputs = []
    if params.get("p") is not None:
        p = params["p"]
        if not psimap.is_prime(p):
            raise DomainError(f"{p} is not prime")
        click.echo(f"F({p})={psimap.count_fixed_points(p)}")
        return outputs
    lo, hi = params["lo"], params["hi"]
    use_cache = params.get("cache", True)
    key = _cache_key("fixed-points", {"lo": lo, "hi": hi})
    rows = None
    if use_cache:
        cached = _cache_load(key)
        if cached is not None:
            rows = [psimap.ScanRow(r["p"], r["F"], r["omega_pm1"]) for r in cached]
            click.echo(f"cache hit: {len(rows)} rows", err=True)
    if rows is None:
        result = psimap.scan_primes(lo, hi)
        rows = list(result.rows)
        if use_cache:
            _cache_store(key, [asdict(r) for r in rows])
    trivial = sum(1 for r in rows if r.F == 1)
    total = len(rows)
    frac = trivial / total if total else 0.0
    click.echo(
        f"primes={total} trivial_only={trivial} trivial_fraction={frac:.6f}"
    )
    out = params.get("out")
    if out:
        psimap.write_scan_csv(rows, out)
        outputs.append(out)
    return outputs


@_trap
def _run_cq(params: dict) -> list[str]:
    q, x0 = params["q"], params.get("x0", 1)
    if not psimap.is_prime(q):
        raise DomainError(f"{q} is not prime")
    mode = params["mode"]
    if mode == "exact":
        est = linforms.exact_estimate(q, x0, params.get("budget", linforms.DEFAULT_EXACT_BUDGET))
        click.echo(f"N={est.exact_count} c={est.exact_fraction_str}≈{est.value:.5f}")
    else:
        est = linforms.mc_estimate_c(
            q, x0, samples=params.get("samples", 10**5), seed=params.get("seed", 0)
        )
        click.echo(
            f"c≈{est.value:.5f} stderr={est.stderr:.5f} "
            f"samples={est.samples} seed={est.seed} generator={est.generator}"
        )
    outputs = []
    out = params.get("out")
    if out:
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("q", "x0", "mode", "value", "samples", "stderr", "seed", "value_exact"))
            w.writerow(
                (
                    est.q,
                    est.x0,
                    est.mode,
                    f"{est.value:.10g}",
                    est.samples,
                    f"{est.stderr:.10g}",
                    "" if est.seed is None else est.seed,
                    est.exact_fraction_str or "",
                )
            )
        outputs.append(out)
    return outputs


@_trap
def _run_nset(params: dict) -> list[str]:
    q = params["q"]
    pr = nset.params_for(q, params.get("c1", 1.0), params.get("c2", 3.0))
    ns = nset.build(q, pr)
    bound = nset.theoretical_complement_bound(q, pr)
    click.echo(
        f"q={q} B={pr.B:.4f} f={pr.f:.4f} members={ns.size} "
        f"complement={ns.complement_size} bound={bound:.1f} "
        f"complement<=bound={ns.complement_size <= bound}"
    )
    outputs = []
    dump = params.get("dump")
    if dump:
        Path(dump).write_bytes(ns.bitmap())
        outputs.append(dump)
    return outputs


@_trap
def _run_multind(params: dict) -> list[str]:
    if params.get("tuple"):
        nums = params["tuple"]
        rank = multind.multiplicative_rank(nums)
        rel = multind.find_relation(nums)
        rel_text = "none" if rel is None else "(" + ",".join(str(a) for a in rel.alphas) + ")"
        click.echo(f"rank={rank} relation={rel_text}")
        return []
    q = params["q"]
    pr = nset.params_for(q, params.get("c1", 1.0), params.get("c2", 3.0))
    pool = nset.build(q, pr).members.tolist()
    frac, stderr = multind.sample_dependence_rate(
        pool, params["k"], params["trials"], params["seed"]
    )
    click.echo(
        f"q={q} k={params['k']} trials={params['trials']} seed={params['seed']} "
        f"dependent_fraction={frac:.6g} stderr={stderr:.6g}"
    )
    return []


@_trap
def _run_stats(params: dict) -> list[str]:
    rows = psimap.read_scan_csv(params["scan"])
    outputs = []
    group_by = params.get("group_by")
    hist_lo, hist_hi = params.get("hist_lo", -4.0), params.get("hist_hi", 4.0)
    hist_width = params.get("hist_width", 0.25)

    def emit(tag: str, subset) -> None:
        scored = fhstats.scores_for_rows(subset)
        zs = [z for _, z in scored]
        if len(zs) >= 3:
            series = fhstats.qq_series(zs)
            click.echo(f"{tag}: n={len(zs)} r2={series.r2:.6f}")
            if params.get("qq"):
                path = _suffixed(params["qq"], tag if group_by else None)
                fhstats.write_qq_csv(series, path)
                outputs.append(path)
        else:
            click.echo(f"{tag}: n={len(zs)} (too few scores for a Q-Q series)")
        if params.get("hist") and zs:
            path = _suffixed(params["hist"], tag if group_by else None)
            fhstats.write_hist_csv(
                fhstats.histogram(zs, hist_width, hist_lo, hist_hi), path
            )
            outputs.append(path)

    if group_by == "omega":
        for label in fhstats.GROUP_LABELS:
            subset = [r for r in rows if fhstats.group_label(r.omega_pm1) == label]
            if subset:
                emit(label, subset)
    else:
        emit("all", rows)
    if params.get("summary"):
        fhstats.write_summary_csv(fhstats.summarize_groups(rows), params["summary"])
        outputs.append(params["summary"])
    return outputs


def _suffixed(path: str, tag: str | None) -> str:
    if not tag:
        return path
    p = Path(path)
    safe = tag.replace("<=", "le").replace(">=", "ge").replace("=", "")
    return str(p.with_name(f"{p.stem}_{safe}{p.suffix}"))


@_trap
def _run_bonferroni(params: dict) -> list[str]:
    q = params["q"]
    if not psimap.is_prime(q):
        raise DomainError(f"{q} is not prime")
    bb = linforms.bonferroni_bounds(q, params["family"], params["K"])
    exact = "n/a" if bb.exact is None else str(bb.exact)
    click.echo(
        f"q={q} K={bb.K} lower={bb.lower} upper={bb.upper} exact={exact} "
        f"tight={bb.is_tight}"
    )
    return []


_CORES = {
    "fixed-points": _run_fixed_points,
    "cq": _run_cq,
    "nset": _run_nset,
    "multind": _run_multind,
    "stats": _run_stats,
    "bonferroni": _run_bonferroni,
}


def _finish(subcommand: str, params: dict) -> None:
    outputs = _CORES[subcommand](params)
    _write_manifest(subcommand, params, outputs)


# --- click wiring ---------------------------------------------------------------


@click.group()
@click.version_option(version=__version__)
@click.option("--threads", type=int, default=None, help="Worker threads for batched kernels (default: all cores).")
def main(threads: int | None):
    """Toolkit for self-power fixed points, avoidance densities, and
    multiplicative independence."""
    if threads is not None:
        if threads < 1:
            raise click.UsageError("--threads must be >= 1")
        import numba

        numba.set_num_threads(threads)


@main.command("fixed-points")
@click.option("--p", type=int, default=None, help="Single prime to evaluate.")
@click.option("--range", "range_", type=str, default=None, help="Prime range lo..hi.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write scan rows as CSV.")
@click.option("--cache/--no-cache", default=True, show_default=True)
def fixed_points(p, range_, out, cache):
    """Fixed-point counts F(p), singly or over a range."""
    if (p is None) == (range_ is None):
        raise click.UsageError("give exactly one of --p or --range")
    params: dict = {"cache": cache}
    if p is not None:
        params["p"] = p
    else:
        lo, hi = _parse_range(range_)
        params.update(lo=lo, hi=hi)
    if out:
        params["out"] = out
    _finish("fixed-points", params)


@main.command()
@click.option("--q", type=int, required=True)
@click.option("--x0", type=int, default=1, show_default=True)
@click.option("--mode", type=click.Choice(["exact", "mc"]), required=True)
@click.option("--samples", type=int, default=100000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--budget", type=int, default=linforms.DEFAULT_EXACT_BUDGET, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cq(q, x0, mode, samples, seed, budget, out):
    """Avoidance density c(q), exactly or by Monte Carlo."""
    params = {"q": q, "x0": x0, "mode": mode}
    if mode == "mc":
        params.update(samples=samples, seed=seed)
    else:
        params["budget"] = budget
    if out:
        params["out"] = out
    _finish("cq", params)


@main.command("nset")
@click.option("--q", type=int, required=True)
@click.option("--c1", type=float, default=1.0, show_default=True)
@click.option("--c2", type=float, default=3.0, show_default=True)
@click.option("--dump", type=click.Path(dir_okay=False), default=None, help="Write the membership bitmap (little-endian bitset, q bits).")
def nset_cmd(q, c1, c2, dump):
    """Build the exponent-restricted subset of [2, q-1]."""
    params = {"q": q, "c1": c1, "c2": c2}
    if dump:
        params["dump"] = dump
    _finish("nset", params)


@main.command("multind")
@click.option("--tuple", "tuple_", type=str, default=None, help="Comma-separated integers, e.g. 2,3,6.")
@click.option("--sample-set", type=click.Choice(["nset"]), default=None)
@click.option("--q", type=int, default=None)
@click.option("--k", type=int, default=2, show_default=True)
@click.option("--trials", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--c1", type=float, default=1.0)
@click.option("--c2", type=float, default=3.0)
def multind_cmd(tuple_, sample_set, q, k, trials, seed, c1, c2):
    """Multiplicative rank and relations, or dependence-rate sampling."""
    if (tuple_ is None) == (sample_set is None):
        raise click.UsageError("give exactly one of --tuple or --sample-set")
    if tuple_ is not None:
        try:
            nums = tuple(int(t) for t in tuple_.split(","))
        except ValueError:
            raise click.UsageError(f"--tuple must be comma-separated integers (got {tuple_!r})")
        _finish("multind", {"tuple": nums})
    else:
        if q is None:
            raise click.UsageError("--sample-set nset requires --q")
        _finish(
            "multind",
            {"q": q, "k": k, "trials": trials, "seed": seed, "c1": c1, "c2": c2},
        )


@main.command("stats")
@click.option("--scan", type=click.Path(exists=True, dir_okay=False), required=True, help="Scan CSV from fixed-points.")
@click.option("--group-by", type=click.Choice(["omega"]), default=None)
@click.option("--qq", type=click.Path(dir_okay=False), default=None)
@click.option("--hist", type=click.Path(dir_okay=False), default=None)
@click.option("--summary", type=click.Path(dir_okay=False), default=None)
@click.option("--hist-lo", type=float, default=-4.0, show_default=True)
@click.option("--hist-hi", type=float, default=4.0, show_default=True)
@click.option("--hist-width", type=float, default=0.25, show_default=True)
def stats(scan, group_by, qq, hist, summary, hist_lo, hist_hi, hist_width):
    """Model scores, Q-Q series, and histograms from a scan CSV."""
    params = {
        "scan": scan,
        "hist_lo": hist_lo,
        "hist_hi": hist_hi,
        "hist_width": hist_width,
    }
    if group_by:
        params["group_by"] = group_by
    for name, val in (("qq", qq), ("hist", hist), ("summary", summary)):
        if val:
            params[name] = val
    _finish("stats", params)


@main.command("bonferroni")
@click.option("--q", type=int, required=True)
@click.option("--family", type=str, required=True, help="Comma-separated n values.")
@click.option("--k", "--K", "K", type=int, required=True)
def bonferroni(q, family, K):
    """Truncated inclusion-exclusion sandwich for a small form family."""
    try:
        members = tuple(int(t) for t in family.split(","))
    except ValueError:
        raise click.UsageError(f"--family must be comma-separated integers (got {family!r})")
    _finish("bonferroni", {"q": q, "family": members, "K": K})


@main.command("replay")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
def replay(manifest):
    """Re-run a recorded manifest; outputs are reproduced byte for byte."""
    data = json.loads(Path(manifest).read_text())
    sub = data.get("subcommand")
    if sub not in _CORES:
        raise _DomainExit(f"manifest names unknown subcommand {sub!r}")
    params = data.get("parameters", {})
    if "tuple" in params and params["tuple"] is not None:
        params["tuple"] = tuple(params["tuple"])
    if "family" in params and params["family"] is not None:
        params["family"] = tuple(params["family"])
    _finish(sub, params)


if __name__ == "__main__":
    sys.exit(main())
