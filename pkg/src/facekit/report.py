"""Run summaries: CSV tables, matplotlib figures, and a Markdown index.

Everything here is derived from artifacts already on disk (training results,
analysis CSVs, occlusion summaries); the report step never recomputes
models.  Figures are rendered headless through the Agg backend and written
with fixed PNG metadata so a rerun over identical inputs is bitwise
identical.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from facekit.errors import MissingFile  # noqa: E402

_PNG_META = {"Software": "facekit"}


def _save(fig, path: Path) -> None:
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)


def read_table(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_table(path, rows: list[dict], fieldnames: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fieldnames)
        w.writeheader()
        for r in rows:
            w.writerow(r)


def fig_family_accuracy(rows: list[dict]) -> "plt.Figure":
    """Bar chart of cross-validated accuracy per feature family.

    ``rows`` need family, mean_accuracy, sd_accuracy (strings are fine).
    """
    rows = sorted(rows, key=lambda r: -float(r["mean_accuracy"]))
    fams = [r["family"] for r in rows]
    means = [100.0 * float(r["mean_accuracy"]) for r in rows]
    sds = [100.0 * float(r.get("sd_accuracy", 0) or 0) for r in rows]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.6 * len(fams) + 1.5), 3.4))
    ax.bar(range(len(fams)), means, yerr=sds, capsize=3, color="#4878cf")
    ax.axhline(50.0, color="0.4", lw=0.8, ls="--")
    ax.set_xticks(range(len(fams)))
    ax.set_xticklabels(fams, rotation=45, ha="right")
    ax.set_ylabel("accuracy (%)")
    ax.set_ylim(0, 100)
    fig.tight_layout()
    return fig


def fig_occlusion(summary: dict) -> "plt.Figure":
    """Accuracy and median RT per occlusion condition, side by side."""
    conds = list(summary["conditions"])
    acc = [100.0 * summary["conditions"][c]["accuracy"] for c in conds]
    rt = [summary["conditions"][c]["rt_median"] for c in conds]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(7.2, 3.2))
    ax1.bar(conds, acc, color="#4878cf")
    ax1.axhline(50.0, color="0.4", lw=0.8, ls="--")
    ax1.set_ylabel("accuracy (%)")
    ax1.set_ylim(0, 100)
    ax2.bar(conds, rt, color="#ee854a")
    ax2.set_ylabel("median RT (ms)")
    fig.tight_layout()
    return fig


def fig_scatter(x, y, xlabel: str, ylabel: str) -> "plt.Figure":
    fig, ax = plt.subplots(figsize=(4.2, 4.0))
    ax.scatter(x, y, s=14, alpha=0.6, color="#4878cf", edgecolors="none")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    return fig


def collect_train_results(results_dir: Path) -> list[dict]:
    """One summary row per train_*.csv file in the results directory."""
    rows = []
    for path in sorted(Path(results_dir).glob("train_*.csv")):
        table = read_table(path)
        if not table:
            continue
        last = table[-1]
        rows.append({
            "task": last["task"],
            "family": last["family"],
            "dim": last["dim"],
            "mean_accuracy": last["mean_accuracy"],
            "sd_accuracy": last["sd_accuracy"],
        })
    return rows


def write_report(out_dir) -> list[Path]:
    """Assemble report.md plus figures from whatever artifacts exist under
    ``out_dir``.  Raises MissingFile naming every expected input if nothing
    is there to report on."""
    out = Path(out_dir)
    report_dir = out / "report"
    results_dir = out / "results"
    analysis_dir = out / "analysis"

    train_rows = collect_train_results(results_dir) if results_dir.is_dir() else []
    occl_path = analysis_dir / "occlusion_summary.json"
    occl = json.loads(occl_path.read_text()) if occl_path.exists() else None
    mh_path = analysis_dir / "model_human.csv"
    mh = read_table(mh_path) if mh_path.exists() else None
    rel_path = analysis_dir / "reliability.csv"
    rel = read_table(rel_path) if rel_path.exists() else None

    if not train_rows and occl is None and mh is None and rel is None:
        raise MissingFile(
            "nothing to report: expected at least one of "
            f"{results_dir}/train_*.csv, {occl_path}, {mh_path}, {rel_path}"
        )

    report_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    lines = ["# Run report", ""]

    if train_rows:
        table_path = report_dir / "model_accuracy.csv"
        write_table(table_path, train_rows,
                    ["task", "family", "dim", "mean_accuracy", "sd_accuracy"])
        written.append(table_path)
        fig_path = report_dir / "model_accuracy.png"
        _save(fig_family_accuracy(train_rows), fig_path)
        written.append(fig_path)
        lines += ["## Classifier accuracy by feature family", "",
                  "![accuracy](model_accuracy.png)", "",
                  "| task | family | dim | accuracy | sd |",
                  "|---|---|---|---|---|"]
        for r in sorted(train_rows, key=lambda r: -float(r["mean_accuracy"])):
            lines.append(
                f"| {r['task']} | {r['family']} | {r['dim']} "
                f"| {100 * float(r['mean_accuracy']):.1f}% "
                f"| {100 * float(r['sd_accuracy']):.1f}% |"
            )
        lines.append("")

    if rel:
        lines += ["## Split-half reliability", "",
                  "| method | r | corrected |", "|---|---|---|"]
        for r in rel:
            lines.append(f"| {r['method']} | {float(r['r']):.4f} "
                         f"| {float(r['corrected']):.4f} |")
        lines.append("")

    if mh:
        x = [float(r["human_accuracy"]) for r in mh]
        y = [float(r["model_score"]) for r in mh]
        fig_path = report_dir / "model_human.png"
        _save(fig_scatter(x, y, "human per-face accuracy", "model score"), fig_path)
        written.append(fig_path)
        lines += ["## Model vs human, per face", "",
                  "![model vs human](model_human.png)", ""]

    if occl is not None:
        fig_path = report_dir / "occlusion.png"
        _save(fig_occlusion(occl), fig_path)
        written.append(fig_path)
        occ_rows = [
            {"condition": c, **{k: v for k, v in d.items()}}
            for c, d in occl["conditions"].items()
        ]
        fields = ["condition"] + sorted({k for r in occ_rows for k in r} - {"condition"})
        table_path = report_dir / "occlusion.csv"
        write_table(table_path, occ_rows, fields)
        written.append(table_path)
        lines += ["## Occlusion conditions", "",
                  "![occlusion](occlusion.png)", "",
                  "| condition | n | accuracy | median RT (ms) |", "|---|---|---|---|"]
        for c, d in occl["conditions"].items():
            lines.append(f"| {c} | {d['n']} | {100 * d['accuracy']:.1f}% "
                         f"| {d['rt_median']:.0f} |")
        lines.append("")
        if occl.get("pairwise"):
            lines += ["| comparison | U | p |", "|---|---|---|"]
            for name, d in occl["pairwise"].items():
                lines.append(f"| {name} | {d['U']:.1f} | {d['p']:.4g} |")
            lines.append("")

    md_path = report_dir / "report.md"
    md_path.write_text("\n".join(lines))
    written.insert(0, md_path)
    return written
