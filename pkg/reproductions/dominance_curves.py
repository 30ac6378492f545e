"""Delta(tau) curves of the simple Bayes estimator against S/n.

For each problem cell the risk difference is plotted over tau for
several multiples of alpha*. Curves below alpha* stay above zero; the
curve at 2 alpha* shows what happens outside the guaranteed range.
"""

import os.path as p

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

import shrinkvar as sv
from shrinkvar.minimax import alpha_star
from shrinkvar.risk import delta_risk
from shrinkvar.utils import working_directory

self_path = p.dirname(p.abspath(__file__))

cells = [(1, 1), (3, 5), (4, 2), (10, 10)]
fractions = [0.25, 0.5, 1.0, 2.0]
taus = np.concatenate([[0.0], np.geomspace(0.05, 200, 60)])


def delta_curves(dims, cfg):
    star = alpha_star(dims)
    return {frac: np.array([delta_risk(frac*star, dims, tau, cfg).value
                            for tau in taus])
            for frac in fractions}


def plot_cell(ax, dims, curves):
    for frac, delta in sorted(curves.items()):
        ax.plot(taus, delta, label='%g alpha*' % frac)
    ax.axhline(0, color='black', linewidth=0.5)
    ax.set_xscale('symlog', linthresh=0.1)
    ax.set_title('p=%d, n=%d' % dims)
    ax.set_xlabel('tau')
    ax.set_ylabel('Delta')


def plot_dominance_curves():
    cfg = sv.QuadConfig()
    fig, axes = plt.subplots(2, 2, figsize=(10, 8))
    for ax, cell in zip(axes.flat, cells):
        dims = sv.ProblemDims(*cell)
        plot_cell(ax, dims, delta_curves(dims, cfg))
    axes.flat[0].legend()
    fig.tight_layout()
    with working_directory(p.join(self_path, "figures")):
        fig.savefig('dominance_curves.png', dpi=150)
    plt.close(fig)


if __name__ == '__main__':
    plot_dominance_curves()
