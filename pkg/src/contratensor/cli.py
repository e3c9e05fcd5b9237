"""Command-line front end.

Subcommands cover the whole workflow: ``synth`` writes a seeded synthetic
foreground/background pair, ``cumulant`` and ``scree`` turn CSV data into
cumulant files and eigenvalue profiles, ``htd`` decomposes a stored tensor,
``fit`` runs either pipeline end to end, ``project`` emits 2-D coordinates
(optionally as an SVG scatter), and ``bench`` runs the synthetic recovery
protocol across dimensions with a worker pool.

Conventions: CSVs are comma separated with rows as samples; a single header
row is auto-detected when its first row is non-numeric, and a header column
named ``label`` is carried along as sample labels rather than data.  Exit
codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.  Errors
are also written as a single JSON line to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .cica import (
    CicaModel,
    fit_general,
    fit_proportional,
    pca_fit,
    pca_transform,
    back_project,
    project,
    scree,
)
from .cumulants import fourth_cumulant, sample_covariance
from .decomp import DecompConfig
from .htd import htd
from .metrics import (
    align_columns,
    cpca_components,
    greedy_align,
    mean_cosine_similarity,
    relative_frobenius_error,
)
from .synth import SyntheticSpec, generate
from .tensor import load_symtensor4, save_symtensor4

__all__ = ["main", "read_csv", "write_csv", "DataFormatError"]

ENV_THREADS = "CONTRATENSOR_THREADS"

#: Contrast-strength grid for the covariance baseline: zero plus a
#: log-even sweep up to 1000.
CPCA_ALPHAS = tuple([0.0] + list(np.logspace(-2, 3, 99)))


class DataFormatError(ValueError):
    """Malformed input data (CSV, tensor file, model file)."""


# ---------------------------------------------------------------------------
# file plumbing
# ---------------------------------------------------------------------------

def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _fmt(value: float) -> str:
    return "%.17g" % value


def read_csv(path) -> tuple[np.ndarray, list[str] | None, list[str] | None]:
    """Read a sample CSV.  Returns ``(data, header, labels)``.

    The header is detected by a non-numeric first row; a header column named
    ``label`` (case-insensitive) is split off as per-row labels.
    """
    path = Path(path)
    try:
        raw_lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataFormatError(f"{path}: {exc.strerror or exc}") from exc
    rows = [row for row in csv.reader(raw_lines)]
    rows = [row for row in rows if any(cell.strip() for cell in row)]
    if not rows:
        raise DataFormatError(f"{path}: no rows")

    def _numeric(cell: str) -> bool:
        try:
            float(cell)
            return True
        except ValueError:
            return False

    header = None
    start = 0
    if not all(_numeric(c) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        start = 1
        print(f"note: {path}: header row detected and skipped", file=sys.stderr)
        if not rows[1:]:
            raise DataFormatError(f"{path}: no rows after header")

    label_col = None
    if header is not None:
        for idx, name in enumerate(header):
            if name.lower() == "label":
                label_col = idx
                break

    width = len(rows[start])
    data = []
    labels = [] if label_col is not None else None
    for line_no, row in enumerate(rows[start:], start=start + 1):
        if len(row) != width:
            raise DataFormatError(
                f"{path}: line {line_no}: expected {width} fields, got {len(row)}"
            )
        values = []
        for col, cell in enumerate(row):
            if col == label_col:
                labels.append(cell.strip())
                continue
            try:
                values.append(float(cell))
            except ValueError:
                raise DataFormatError(
                    f"{path}: line {line_no}, column {col + 1}: non-numeric cell {cell.strip()!r}"
                ) from None
        data.append(values)
    matrix = np.array(data, dtype=float)
    if matrix.ndim != 2 or matrix.shape[1] == 0:
        raise DataFormatError(f"{path}: no numeric columns")
    return matrix, header, labels


def write_csv(path: Path, matrix: np.ndarray, header: list[str] | None = None,
              labels: list[str] | None = None) -> None:
    """Write a matrix as CSV with 17 significant digits per value."""
    lines = []
    if header is not None:
        lines.append(",".join(header))
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    for i in range(matrix.shape[0]):
        cells = [_fmt(x) for x in matrix[i]]
        if labels is not None:
            cells.append(labels[i])
        lines.append(",".join(cells))
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_json(path: Path, doc) -> None:
    _atomic_write(path, json.dumps(doc, indent=1) + "\n")


def write_svg(path: Path, coords: np.ndarray, labels: list[str] | None = None) -> None:
    """Minimal static scatter: frame, axis ticks, label-colored points."""
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]
    width, height, margin = 640, 480, 50
    x, y = coords[:, 0], coords[:, 1]
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    xspan = (x1 - x0) or 1.0
    yspan = (y1 - y0) or 1.0

    def sx(v):
        return margin + (v - x0) / xspan * (width - 2 * margin)

    def sy(v):
        return height - margin - (v - y0) / yspan * (height - 2 * margin)

    colors = {}
    if labels is not None:
        for lab in labels:
            if lab not in colors:
                colors[lab] = palette[len(colors) % len(palette)]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
        f'height="{height - 2 * margin}" fill="none" stroke="#333"/>',
        f'<text x="{margin}" y="{height - margin + 18}" font-size="11">{x0:.4g}</text>',
        f'<text x="{width - margin - 30}" y="{height - margin + 18}" font-size="11">{x1:.4g}</text>',
        f'<text x="{margin - 45}" y="{height - margin}" font-size="11">{y0:.4g}</text>',
        f'<text x="{margin - 45}" y="{margin + 10}" font-size="11">{y1:.4g}</text>',
    ]
    for i in range(coords.shape[0]):
        fill = colors[labels[i]] if labels is not None else palette[0]
        parts.append(
            f'<circle cx="{sx(x[i]):.2f}" cy="{sy(y[i]):.2f}" r="2.5" '
            f'fill="{fill}" fill-opacity="0.7"/>'
        )
    parts.append("</svg>")
    _atomic_write(path, "\n".join(parts) + "\n")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _worker_count() -> int:
    cap = os.environ.get(ENV_THREADS)
    available = os.cpu_count() or 1
    if cap is not None:
        try:
            return max(1, min(int(cap), available))
        except ValueError:
            raise DataFormatError(f"{ENV_THREADS}={cap!r} is not an integer") from None
    return available


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_synth(args) -> None:
    out = _out_dir(args)
    spec = SyntheticSpec(
        dim=args.p,
        rank_bg=args.rank_r,
        rank_fg=args.rank_l,
        n_fg=args.n_fg,
        n_bg=args.n_bg,
        seed=args.seed,
        mode={"general": "general", "prop": "proportional"}[args.mode],
        orthonormal_fg=not args.unit_fg,
    )
    fg, bg, truth = generate(spec)
    write_csv(out / "X.csv", fg)
    write_csv(out / "Y.csv", bg)
    _write_json(out / "truth.json", {
        "mixing_bg": [[float(x) for x in row] for row in truth.mixing_bg],
        "mixing_fg": [[float(x) for x in row] for row in truth.mixing_fg],
        "scale_salient": list(truth.scale_salient),
        "scale_shared_bg": list(truth.scale_shared_bg),
        "scale_shared_fg": list(truth.scale_shared_fg),
        "gamma": truth.gamma,
        "seed": spec.seed,
        "mode": spec.mode,
    })
    print(f"wrote X.csv ({fg.shape[0]}x{fg.shape[1]}), Y.csv ({bg.shape[0]}x{bg.shape[1]}), "
          f"truth.json to {out}")


def _load_roles(args, need_both: bool = False) -> list[tuple[str, np.ndarray]]:
    roles = []
    if args.fg is not None:
        roles.append(("foreground", read_csv(args.fg)[0]))
    if args.bg is not None:
        roles.append(("background", read_csv(args.bg)[0]))
    if need_both and len(roles) != 2:
        raise DataFormatError("both --fg and --bg are required")
    if not roles:
        raise DataFormatError("at least one of --fg/--bg is required")
    return roles


def cmd_cumulant(args) -> None:
    out = _out_dir(args)
    for role, data in _load_roles(args):
        cov = sample_covariance(data)
        t = fourth_cumulant(data)
        write_csv(out / f"{role}_kappa2.csv", cov)
        save_symtensor4(out / f"{role}_kappa4.txt", t)
        print(f"{role}: wrote {role}_kappa2.csv and {role}_kappa4.txt (p={data.shape[1]})")


def cmd_scree(args) -> None:
    out = _out_dir(args)
    summary = {}
    for role, data in _load_roles(args):
        report = scree(fourth_cumulant(data))
        rows = np.column_stack([np.arange(report.magnitudes.size), report.magnitudes])
        write_csv(out / f"{role}_scree.csv", rows, header=["index", "magnitude"])
        if report.magnitudes.size == 0 or report.magnitudes[0] < 1e-12:
            print(f"warning: {role}: all eigenvalue magnitudes are ~0 "
                  "(zero-variance data?)", file=sys.stderr)
        summary[role] = report.suggested_rank
        print(f"{role}: suggested rank {report.suggested_rank}")
    _write_json(out / "scree_summary.json", {"suggested_rank": summary})


def cmd_htd(args) -> None:
    out = _out_dir(args)
    t = load_symtensor4(args.input)
    decomposition = htd(t, args.rank)
    _write_json(out / "decomposition.json", {
        "terms": [
            {"weight": float(w), "vector": [float(x) for x in v]}
            for w, v in decomposition
        ],
        "diagnostics": list(decomposition.diagnostics),
    })
    print(f"wrote decomposition.json with {len(decomposition)} terms to {out}")


def _parse_pca_k(value: str):
    if value == "auto":
        return "auto"
    if value == "none":
        return None
    try:
        k = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--pca-k must be an integer, 'auto', or 'none', got {value!r}"
        ) from None
    if k < 1:
        raise argparse.ArgumentTypeError("--pca-k must be positive")
    return k


def cmd_fit(args) -> None:
    out = _out_dir(args)
    fg_raw, _, _ = read_csv(args.fg)
    bg_raw, _, _ = read_csv(args.bg)
    if fg_raw.shape[1] != bg_raw.shape[1]:
        raise DataFormatError(
            f"foreground has {fg_raw.shape[1]} columns, background {bg_raw.shape[1]}"
        )

    basis = None
    fg, bg = fg_raw, bg_raw
    if args.pca_k is not None:
        k = None if args.pca_k == "auto" else args.pca_k
        basis = pca_fit(fg_raw, bg_raw, k)
        fg = pca_transform(fg_raw, basis)
        bg = pca_transform(bg_raw, basis)
        print(f"pca: kept {basis.components.shape[1]} components "
              f"({basis.explained.sum():.1%} of variance)")

    cov_fg = sample_covariance(fg)
    cov_bg = sample_covariance(bg)
    t_fg = fourth_cumulant(fg)
    t_bg = fourth_cumulant(bg)

    rank_r = args.rank_r if args.rank_r is not None else scree(t_bg).suggested_rank
    if args.rank_l is not None:
        rank_l = args.rank_l
    else:
        q = args.q if args.q is not None else scree(t_fg).suggested_rank
        rank_l = q - rank_r
    if rank_l < 1:
        raise ValueError(
            f"derived foreground rank {rank_l} (q - r) is not positive; "
            "pass --rank-l or adjust --q/--rank-r"
        )

    cfg = DecompConfig(restarts=args.restarts, seed=args.seed)
    if args.mode == "general":
        model = fit_general(t_fg, t_bg, rank_r, rank_l, cfg,
                            cov_fg=cov_fg, cov_bg=cov_bg, pca=basis)
        print(f"general fit: r={rank_r} l={rank_l} seed={cfg.seed}")
    else:
        model = fit_proportional(t_fg, t_bg, rank_l, gamma=args.gamma, config=cfg,
                                 rank_bg=rank_r if args.gamma is None else None,
                                 cov_fg=cov_fg, cov_bg=cov_bg, pca=basis)
        spread = model.diagnostics.get("gamma_spread")
        spread_note = f" spread={spread:.4f}" if spread is not None else ""
        print(f"proportional fit: l={rank_l} gamma={model.gamma:.6g}{spread_note}")

    model.save(out / "model.json")
    patterns = model.foreground_matrix
    names = [f"b{i + 1}" for i in range(patterns.shape[1])]
    write_csv(out / "patterns.csv", patterns, header=names)
    if basis is not None:
        lifted, _ = back_project(patterns, basis)
        write_csv(out / "patterns_original.csv", lifted, header=names)
    print(f"wrote model.json and pattern CSVs to {out}")


def cmd_project(args) -> None:
    out = _out_dir(args)
    model = _load_model(args.model)
    data, _, labels = read_csv(args.fg)
    i, j = args.components
    coords = project(data, model, i, j)
    header = [f"b{i + 1}", f"b{j + 1}"]
    if labels is not None:
        header.append("label")
    write_csv(out / "projection.csv", coords, header=header, labels=labels)
    if args.svg:
        write_svg(out / "projection.svg", coords, labels)
        print(f"wrote projection.csv and projection.svg to {out}")
    else:
        print(f"wrote projection.csv to {out}")


def _load_model(path) -> CicaModel:
    try:
        return CicaModel.load(path)
    except OSError as exc:
        raise DataFormatError(f"{path}: {exc.strerror or exc}") from exc
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DataFormatError(f"{path}: malformed model file ({exc})") from exc


# ---------------------------------------------------------------------------
# benchmark harness
# ---------------------------------------------------------------------------

def _bench_data(p: int, mode: str, n: int, seed: int):
    """Cumulants, covariances and truth for one synthetic benchmark dataset."""
    spec = SyntheticSpec(dim=p, rank_bg=p, rank_fg=p - 1, n_fg=n, n_bg=n,
                         seed=seed, mode=mode)
    fg, bg, truth = generate(spec)
    return {
        "t_fg": fourth_cumulant(fg),
        "t_bg": fourth_cumulant(bg),
        "cov_fg": sample_covariance(fg),
        "cov_bg": sample_covariance(bg),
        "b_true": truth.mixing_fg,
        "gamma_true": truth.gamma,
    }


def _score(b_true: np.ndarray, b_est: np.ndarray) -> tuple[float, float]:
    perm, signs = greedy_align(b_true, b_est)
    aligned = align_columns(b_est, perm, signs)
    return mean_cosine_similarity(b_true, aligned), relative_frobenius_error(b_true, aligned)


def _bench_general_run(task) -> dict:
    """One independent run: fresh data draw and decomposition, both at ``seed``."""
    p, seed, restarts, n = task
    data = _bench_data(p, "general", n, seed)
    start = time.perf_counter()
    model = fit_general(data["t_fg"], data["t_bg"], p, p - 1,
                        DecompConfig(restarts=restarts, seed=seed),
                        cov_fg=data["cov_fg"], cov_bg=data["cov_bg"])
    elapsed = (time.perf_counter() - start) * 1000.0
    cosine, frob = _score(data["b_true"], model.foreground_matrix)
    return {"method": "general", "hyperparameter": "", "p": p, "seed": seed,
            "mean_cosine": cosine, "rel_frobenius": frob, "runtime_ms": elapsed}


def _bench_proportional_run(p: int, seed: int, restarts: int, data) -> dict:
    start = time.perf_counter()
    model = fit_proportional(data["t_fg"], data["t_bg"], p - 1,
                             config=DecompConfig(restarts=restarts, seed=seed),
                             rank_bg=p,
                             cov_fg=data["cov_fg"], cov_bg=data["cov_bg"])
    elapsed = (time.perf_counter() - start) * 1000.0
    cosine, frob = _score(data["b_true"], model.foreground_matrix)
    return {"method": "proportional", "hyperparameter": _fmt(model.gamma), "p": p,
            "seed": seed, "mean_cosine": cosine, "rel_frobenius": frob,
            "runtime_ms": elapsed}


def _bench_cpca_rows(p: int, data, suffix: str, seed: int = 0) -> list[dict]:
    rows = []
    for alpha in CPCA_ALPHAS:
        start = time.perf_counter()
        comps = cpca_components(data["cov_fg"], data["cov_bg"], alpha, p - 1)
        elapsed = (time.perf_counter() - start) * 1000.0
        cosine, frob = _score(data["b_true"], comps)
        rows.append({"method": f"cpca_{suffix}", "hyperparameter": _fmt(alpha), "p": p,
                     "seed": seed, "mean_cosine": cosine, "rel_frobenius": frob,
                     "runtime_ms": elapsed})
    return rows


_BENCH_FIELDS = ["method", "hyperparameter", "p", "seed",
                 "mean_cosine", "rel_frobenius", "runtime_ms"]


def cmd_bench(args) -> None:
    out = _out_dir(args)
    p_values = args.p_list
    methods = args.methods
    workers = _worker_count()
    rows_path = out / "bench.csv"
    all_rows: list[dict] = []
    with open(rows_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=_BENCH_FIELDS)
        writer.writeheader()
        handle.flush()
        for p in p_values:
            rows: list[dict] = []
            if "general" in methods:
                tasks = [(p, args.seed + s, args.restarts, args.n_samples)
                         for s in range(args.n_seeds)]
                if workers > 1:
                    with ProcessPoolExecutor(max_workers=workers) as pool:
                        rows.extend(pool.map(_bench_general_run, tasks))
                else:
                    rows.extend(_bench_general_run(t) for t in tasks)
            if "cpca" in methods:
                data = _bench_data(p, "general", args.n_samples, args.seed)
                rows.extend(_bench_cpca_rows(p, data, "general", args.seed))
            if "prop" in methods or "cpca" in methods:
                data = _bench_data(p, "proportional", args.n_samples, args.seed)
                if "prop" in methods:
                    rows.append(_bench_proportional_run(p, args.seed, args.restarts, data))
                if "cpca" in methods:
                    rows.extend(_bench_cpca_rows(p, data, "proportional", args.seed))
            rows.sort(key=lambda r: (r["method"], r["seed"], r["hyperparameter"]))
            for row in rows:
                formatted = dict(row)
                for key in ("mean_cosine", "rel_frobenius", "runtime_ms"):
                    formatted[key] = _fmt(row[key])
                writer.writerow(formatted)
            handle.flush()
            all_rows.extend(rows)
            print(f"p={p}: {len(rows)} rows")

    summary_lines = ["method,p,best_cosine,q1_cosine,q3_cosine,best_rel_frobenius"]
    for method in sorted({r["method"] for r in all_rows}):
        for p in p_values:
            cos = np.array([r["mean_cosine"] for r in all_rows
                            if r["method"] == method and r["p"] == p])
            frob = np.array([r["rel_frobenius"] for r in all_rows
                             if r["method"] == method and r["p"] == p])
            if cos.size == 0:
                continue
            summary_lines.append(
                f"{method},{p},{_fmt(cos.max())},{_fmt(np.percentile(cos, 25))},"
                f"{_fmt(np.percentile(cos, 75))},{_fmt(frob.min())}"
            )
    _atomic_write(out / "bench_summary.csv", "\n".join(summary_lines) + "\n")
    print(f"wrote bench.csv and bench_summary.csv to {out}")


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(json.dumps({"error": message, "code": 2}), file=sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _components(value: str) -> tuple[int, int]:
    try:
        i, j = (int(x) for x in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--components expects 'I,J' (zero-based), got {value!r}"
        ) from None
    return i, j


def _int_list(value: str) -> list[int]:
    try:
        return [int(x) for x in value.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {value!r}") from None


def _method_list(value: str) -> list[str]:
    methods = [m.strip() for m in value.split(",") if m.strip()]
    for m in methods:
        if m not in ("general", "prop", "cpca"):
            raise argparse.ArgumentTypeError(f"unknown method {m!r}")
    return methods


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="contratensor",
                     description="Contrastive pattern discovery from foreground/background data")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic foreground/background pair")
    p_synth.add_argument("--p", type=int, required=True, help="observed dimension")
    p_synth.add_argument("--rank-r", type=int, required=True, help="number of shared sources")
    p_synth.add_argument("--rank-l", type=int, required=True, help="number of salient sources")
    p_synth.add_argument("--n-fg", type=int, default=100_000)
    p_synth.add_argument("--n-bg", type=int, default=100_000)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--mode", choices=["general", "prop"], default="general")
    p_synth.add_argument("--unit-fg", action="store_true",
                         help="salient patterns are unit but not orthonormal")
    p_synth.add_argument("--out", required=True)
    p_synth.set_defaults(func=cmd_synth)

    p_cum = sub.add_parser("cumulant", help="write covariance and fourth-cumulant files")
    p_cum.add_argument("--fg", help="foreground CSV")
    p_cum.add_argument("--bg", help="background CSV")
    p_cum.add_argument("--out", required=True)
    p_cum.set_defaults(func=cmd_cumulant)

    p_scree = sub.add_parser("scree", help="eigenvalue profiles and rank suggestions")
    p_scree.add_argument("--fg", help="foreground CSV")
    p_scree.add_argument("--bg", help="background CSV")
    p_scree.add_argument("--out", required=True)
    p_scree.set_defaults(func=cmd_scree)

    p_htd = sub.add_parser("htd", help="hierarchically decompose a stored tensor")
    p_htd.add_argument("--input", required=True, help="symtensor4 text file")
    p_htd.add_argument("--rank", type=int, required=True)
    p_htd.add_argument("--out", required=True)
    p_htd.set_defaults(func=cmd_htd)

    p_fit = sub.add_parser("fit", help="fit a contrastive model end to end")
    p_fit.add_argument("--fg", required=True, help="foreground CSV")
    p_fit.add_argument("--bg", required=True, help="background CSV")
    p_fit.add_argument("--mode", choices=["general", "prop"], default="general")
    p_fit.add_argument("--rank-r", type=int, help="shared rank (default: scree suggestion)")
    p_fit.add_argument("--rank-l", type=int, help="salient rank (default: q - r)")
    p_fit.add_argument("--q", type=int, help="total rank, used to derive --rank-l")
    p_fit.add_argument("--gamma", type=float, help="fixed proportionality constant (prop mode)")
    p_fit.add_argument("--pca-k", type=_parse_pca_k, default="auto",
                       help="PCA components: integer, 'auto', or 'none'")
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--restarts", type=int, default=30)
    p_fit.add_argument("--out", required=True)
    p_fit.set_defaults(func=cmd_fit)

    p_proj = sub.add_parser("project", help="project foreground rows on two ranked patterns")
    p_proj.add_argument("--fg", required=True, help="foreground CSV")
    p_proj.add_argument("--model", required=True, help="model JSON from fit")
    p_proj.add_argument("--components", type=_components, default=(0, 1),
                        help="zero-based ranked pattern indices I,J (default 0,1)")
    p_proj.add_argument("--svg", action="store_true", help="also write an SVG scatter")
    p_proj.add_argument("--out", required=True)
    p_proj.set_defaults(func=cmd_project)

    p_bench = sub.add_parser("bench", help="synthetic recovery benchmark across dimensions")
    p_bench.add_argument("--p-list", type=_int_list, default=list(range(4, 13)),
                         help="dimensions, default 4..12")
    p_bench.add_argument("--n-seeds", type=int, default=100,
                         help="decomposition seeds per dimension (general method)")
    p_bench.add_argument("--n-samples", type=int, default=100_000)
    p_bench.add_argument("--methods", type=_method_list, default=["general", "prop", "cpca"])
    p_bench.add_argument("--seed", type=int, default=0, help="base seed")
    p_bench.add_argument("--restarts", type=int, default=30)
    p_bench.add_argument("--out", required=True)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except DataFormatError as exc:
        print(json.dumps({"error": str(exc), "code": 3}), file=sys.stderr)
        return 3
    except (ValueError, RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(json.dumps({"error": str(exc), "code": 4}), file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
