"""Figure rendering for sweep results and playbook risk tables.

Everything goes through the Agg backend and writes PNG files next to the
delimited output; the CSV stays the canonical record, the figures are the
human-readable view of the same rows.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .sweep import SweepRow  # noqa: E402

MODE_COLORS = {"fixed": "tab:orange", "purple": "tab:green", "spne": "tab:blue"}
_DPI = 120


def _by_mode(rows: list[SweepRow]) -> dict[str, list[SweepRow]]:
    grouped: dict[str, list[SweepRow]] = {}
    for row in rows:
        if row.error:
            continue
        grouped.setdefault(row.mode, []).append(row)
    for mode in grouped:
        grouped[mode].sort(key=lambda r: r.skill)
    return grouped


def render_sweep_figures(rows: list[SweepRow], outdir: str | Path, name: str = "sweep") -> list[Path]:
    """Two charts per sweep: risk/accuracy vs skill, entry value vs skill."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    grouped = _by_mode(rows)
    paths = []

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for mode in sorted(grouped):
        pts = grouped[mode]
        color = MODE_COLORS.get(mode, "tab:gray")
        ax.plot(
            [r.skill for r in pts], [r.entry_risk for r in pts],
            color=color, marker="o", label=f"{mode}: entry risk",
        )
        ax.plot(
            [r.skill for r in pts], [r.accuracy for r in pts],
            color=color, marker="s", linestyle="--", label=f"{mode}: model accuracy",
        )
    ax.set_xlabel("attacker skill")
    ax.set_ylabel("risk score / model accuracy")
    ax.set_ylim(-0.05, 1.05)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = outdir / f"{name}_risk_accuracy.png"
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for mode in sorted(grouped):
        pts = grouped[mode]
        ax.plot(
            [r.skill for r in pts], [r.entry_value for r in pts],
            color=MODE_COLORS.get(mode, "tab:gray"), marker="o", label=f"{mode} defender",
        )
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("attacker skill")
    ax.set_ylabel("attacker value at entry node")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = outdir / f"{name}_entry_value.png"
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    paths.append(path)
    return paths


def render_risk_figure(risks: dict[str, float], outdir: str | Path, name: str = "playbook") -> Path:
    """Bar chart of per-node risk for one solved playbook."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    nodes = sorted(risks)
    values = [min(risks[n], 1.0) for n in nodes]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    bars = ax.bar(range(len(nodes)), values, color="tab:red", alpha=0.75)
    for bar, node in zip(bars, nodes):
        if risks[node] > 1.0:
            bar.set_hatch("//")
    ax.set_xticks(range(len(nodes)))
    ax.set_xticklabels(nodes, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("risk score (display capped at 1)")
    ax.set_ylim(0, 1.05)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    path = outdir / f"{name}_risk_by_node.png"
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
