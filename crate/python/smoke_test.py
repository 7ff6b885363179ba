"""Smoke test for the netform Python bindings.

Uses an installed `netform` module when there is one (`pip install ./crates/py`),
otherwise the library left in target/ by `cargo build -p netform-py`.
"""

import importlib.machinery
import importlib.util
import math
import pathlib
import sys


def load():
    try:
        import netform

        return netform
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        for name in ("libnetform_py.so", "libnetform_py.dylib", "netform_py.dll"):
            path = root / "target" / profile / name
            if path.exists():
                loader = importlib.machinery.ExtensionFileLoader("netform", str(path))
                spec = importlib.util.spec_from_file_location("netform", path, loader=loader)
                module = importlib.util.module_from_spec(spec)
                loader.exec_module(module)
                return module
    sys.exit("netform extension not found; run `cargo build -p netform-py` first")


def main():
    nf = load()

    indifferent = nf.ModelParams([0.5, 0.5], alpha_decay=1.0, link_cost=0.2)
    assert indifferent.homophily() == [0.0, 0.0]
    assert indifferent.gregariousness(1, 2) == 4
    report = indifferent.oracle()
    assert report["mean_gregariousness"] == 4.0
    assert abs(report["crossover_multiplier"] - nf.crossover_multiplier(4.0)) < 1e-12

    exclusive = nf.ModelParams([0.7, 0.3], alpha_decay=0.0, gamma=1.0)
    assert exclusive.homophily() == [1.0, 1.0]
    assert abs(nf.h1_elft(0.5, 0.0, 3.0) - 5.0) < 1e-12

    w = nf.lambert_w_minus1(-0.2)
    assert abs(w * math.exp(w) + 0.2) < 1e-12 and w < -1.0

    runs = {}
    for gamma in (0.0, 1.0):
        params = exclusive.with_gamma(gamma)
        runs[gamma] = nf.simulate(params, horizon=800, seed=3, replications=2, warmup=100)
    low, high = runs[0.0].elft(warmup=100, ty=1), runs[1.0].elft(warmup=100, ty=1)
    assert low["mean"] < high["mean"], (low, high)
    verdict, eps, gap = nf.fosd(runs[1.0].lft_samples(100), runs[0.0].lft_samples(100))
    assert verdict == "a", (verdict, eps, gap)

    again = nf.simulate(exclusive, horizon=800, seed=3, replications=2, warmup=100)
    assert again.edges(1) == runs[1.0].edges(1)
    assert again.config_hash == runs[1.0].config_hash

    tracked = nf.simulate(indifferent, horizon=600, seed=1, replications=20, tracked=[20])
    points = tracked.mean_trajectory(20)
    exponent, r2 = nf.fit_growth([(t, d) for t, d in points if t >= 80], "power")
    assert 0.4 < exponent < 1.0 and r2 > 0.9, (exponent, r2)

    try:
        nf.ModelParams([0.5, 0.4])
    except ValueError as e:
        assert "sum" in str(e)
    else:
        raise AssertionError("unnormalized probabilities accepted")

    print(f"netform {nf.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
