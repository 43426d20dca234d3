from typing import Sequence, Tuple

import matplotlib as mpl # type: ignore
mpl.use('Agg')
import matplotlib.pyplot as plt # type: ignore  # noqa: E402

from simpleLogger import CHATTY, DEBUG, INFO, WARN, ERROR  # noqa: F401, E402

SliceSizes = Sequence[Tuple[int, int]]

def plot_branchial_sizes(before: SliceSizes, after: SliceSizes, output_file: str, title: str = "") -> bool:
    """Branchial states and edges per slice, before and after completion. Returns False if there is nothing to draw."""
    if not before and not after:
        INFO("No branchial sizes to plot.")
        return False

    plt.style.use('seaborn-v0_8-deep')
    fig, (ax_states, ax_edges) = plt.subplots(1, 2, figsize=(12, 5), sharex=True)

    for sizes, label, marker in ((before, 'original rules', 'o'), (after, 'completed rules', 's')):
        if not sizes:
            continue
        slices = list(range(len(sizes)))
        ax_states.plot(slices, [s for s, _ in sizes], marker=marker, label=label)
        ax_edges.plot(slices, [e for _, e in sizes], marker=marker, label=label)

    ax_states.set_ylabel('States in slice')
    ax_edges.set_ylabel('Branchial edges')
    for ax in (ax_states, ax_edges):
        ax.set_xlabel('Slice')
        ax.legend()
        ax.grid(True, which='both', linestyle='--', linewidth=0.5)
    if title:
        fig.suptitle(title)

    plt.tight_layout()
    plt.savefig(output_file)
    plt.close(fig)
    INFO(f"Saved branchial size plot to {output_file}")
    return True
