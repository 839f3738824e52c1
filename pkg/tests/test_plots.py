"""Report figures render to files for edge inputs too."""

from drjcc.oracle import RegionComparison
from drjcc.plots import plot_benchmark, plot_region_comparison
from drjcc.uc import UCBuildReport


def test_benchmark_figure_without_diffs(tmp_path):
    reports = [
        UCBuildReport("r1", "tiny", 1, "sfla", 0.05, 0.1, 20,
                      "error: boom", None, 0.2, None, None, None),
        UCBuildReport("r2", "tiny", 1, "exacts", 0.05, 0.1, 20,
                      "infeasible", None, 0.3, None, None, None),
    ]
    out = tmp_path / "bench.png"
    plot_benchmark(reports, out)
    assert out.stat().st_size > 0


def test_comparison_figure_with_borderline(tmp_path):
    comp = RegionComparison(descriptor="toy", n_samples=10)
    comp.acceptance = {"la": 4, "sfla": 5, "exact-oracle": 6}
    comp.borderline = 2
    out = tmp_path / "cmp.png"
    plot_region_comparison(comp, out)
    assert out.stat().st_size > 0
