"""Figure rendering for the CLI report path (optional, opt-in via --plot)."""

from __future__ import annotations


def render_table(command, columns, rows, path):
    """Render a command's output table as a figure next to the delimited file.

    Grid commands get line plots of every value column against the first
    column; count tables get a bar chart.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if not rows:
        raise ValueError("nothing to plot: table has no rows")
    cols = list(zip(*rows))
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    if command == "counts":
        ax.bar([float(v) for v in cols[0]], [float(v) for v in cols[1]], width=0.8)
        ax.set_xlabel(columns[0])
        ax.set_ylabel(columns[1])
    else:
        xs = [float(v) for v in cols[0]]
        for name, values in zip(columns[1:], cols[1:]):
            try:
                ys = [float(v) for v in values]
            except (TypeError, ValueError):
                continue
            ax.plot(xs, ys, label=name)
        ax.set_xlabel(columns[0])
        if len(columns) > 1:
            ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    ax.set_title(command)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
