"""Line charts written as SVG with reproducible bytes."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_RC = {"svg.hashsalt": "polwitness", "svg.fonttype": "none", "font.size": 9}


def line_chart(path, series, xlabel, ylabel, title=None):
    """Save a chart of ``series``, a list of dicts with keys ``x``, ``y``, ``label``
    and optionally ``style`` (``"line"``, ``"points"``) and ``yerr``."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        for s in series:
            style = s.get("style", "line")
            if style == "points":
                ax.errorbar(s["x"], s["y"], yerr=s.get("yerr"), fmt="o", ms=4,
                            capsize=2, label=s["label"])
            else:
                ax.plot(s["x"], s["y"], label=s["label"], lw=1.2)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.grid(alpha=0.3)
        ax.legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
