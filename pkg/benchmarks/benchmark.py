import os.path as p
import pickle as pkl
import sys
import time

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

import shrinkvar as sv
from shrinkvar.minimax import alpha_star, dominance_scan
from shrinkvar.risk import delta_risk, risk_mc
from shrinkvar.utils import working_directory

self_path = p.dirname(p.abspath(__file__))

scale_factor = 1000 # Show times in ms


def time_call(func, *args):
    then = time.time()
    func(*args)
    return time.time() - then


def benchmark_delta_save(taus, orders):
    """Time one delta_risk evaluation against tau for several
    quadrature orders. The cost grows with the number of Poisson
    mixture terms, i.e. roughly like sqrt(tau) for large tau."""
    dims = sv.ProblemDims(4, 2)
    alpha = alpha_star(dims)
    run_time = np.zeros((len(orders), len(taus)))
    for i, order in enumerate(orders):
        cfg = sv.QuadConfig(order=order)
        for k, tau in enumerate(taus):
            run_time[i, k] = time_call(delta_risk, alpha, dims, tau, cfg)

    with working_directory(p.join(self_path, "delta_risk")):
        with open("times.pkl", "wb") as f:
            pkl.dump((taus, orders, run_time), f)


def benchmark_delta_plot():
    with working_directory(p.join(self_path, "delta_risk")):
        with open("times.pkl", "rb") as f:
            (taus, orders, run_time) = pkl.load(f)

        plt.figure()
        for order, times in zip(orders, run_time):
            plt.loglog(taus, times*scale_factor, '-*',
                       label='%d nodes' % order)
        plt.legend()
        plt.xlabel('Noncentrality tau')
        plt.ylabel('Time per delta_risk call (ms)')
        plt.title('Cost of the exact risk difference, p=4, n=2')
        plt.savefig('delta_risk_scaling.png', dpi=150)


def benchmark_workloads_save():
    """Wall time of the acceptance workloads: the 120 cell dominance
    grid and Monte Carlo risk with a million samples."""
    cfg = sv.QuadConfig()
    names = []
    times = []

    then = time.time()
    for cell in [(1, 1), (3, 5), (4, 2), (10, 10)]:
        dims = sv.ProblemDims(*cell)
        for frac in [0.25, 0.5, 1.0]:
            dominance_scan(frac*alpha_star(dims), dims, sv.DEFAULT_TAU_GRID,
                           cfg)
    names.append('dominance grid')
    times.append(time.time() - then)

    mc = sv.McConfig(1000000, sv.SeedSpec(20240601))
    names.append('risk_mc 1e6')
    times.append(time_call(risk_mc, sv.EstimatorSpec.stein(),
                           sv.ProblemDims(4, 2), 10.0, mc))

    with working_directory(p.join(self_path, "workloads")):
        with open("times.pkl", "wb") as f:
            pkl.dump((names, times), f)


def benchmark_workloads_plot():
    with working_directory(p.join(self_path, "workloads")):
        with open("times.pkl", "rb") as f:
            (names, times) = pkl.load(f)

        plt.figure()
        plt.bar(range(len(names)), times)
        plt.xticks(range(len(names)), names)
        plt.ylabel('Wall time (s)')
        plt.title('Acceptance workloads')
        plt.savefig('workloads.png', dpi=150)


def benchmark_delta(taus, orders):
    benchmark_delta_save(taus, orders)
    benchmark_delta_plot()


def benchmark_workloads():
    benchmark_workloads_save()
    benchmark_workloads_plot()


if __name__ == '__main__':
    taus = np.array([0.1, 1, 10, 100, 1000, 10000])
    orders = [32, 64, 128, 256]
    if len(sys.argv) > 1:
        if sys.argv[1] == "save":
            benchmark_delta_save(taus, orders)
            benchmark_workloads_save()
        else:
            benchmark_delta_plot()
            benchmark_workloads_plot()
    else:
        benchmark_delta(taus, orders)
        benchmark_workloads()
