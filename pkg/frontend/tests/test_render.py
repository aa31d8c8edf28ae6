import subprocess
import sys

import pytest

from aircomp_plots import PlotSpec, SchemaError, render
from aircomp_plots.cli import EXIT_INPUT, EXIT_OK, EXIT_USAGE, main

HEADER = "scheme,theta0,snr_db,N,K,L,mse_mean,mse_std,num_geometries,rng_seed\n"


def fig2_like_csv(tmp_path, thetas=(0.0, 0.1, 0.2, 0.3)):
    """CSV shaped like the uncertainty-vs-SNR sweep: 3 schemes x 2 SNRs."""
    lines = [HEADER]
    for scheme in ("fixed_position", "ignore_csi", "proposed"):
        for theta in thetas:
            for snr in (5.0, 10.0):
                mse = 0.05 + 0.1 * theta + (0.02 if scheme != "proposed" else 0.0)
                mse += 0.01 if snr == 5.0 else 0.0
                lines.append(f"{scheme},{theta},{snr},8,10,8.0,{mse},0.005,50,1\n")
    path = tmp_path / "fig2.csv"
    path.write_text("".join(lines))
    return path


class TestRender:
    def test_fig2_replica_has_six_legend_entries(self, tmp_path):
        csv_path = fig2_like_csv(tmp_path)
        out = tmp_path / "fig2.png"
        fig = render(PlotSpec(str(csv_path), "snr_db", str(out)))
        assert out.exists() and out.stat().st_size > 0
        legend = fig.axes[0].get_legend()
        assert len(legend.get_texts()) == 6
        assert len(fig.axes[0].lines) >= 6

    def test_legend_labels_name_scheme_and_group(self, tmp_path):
        csv_path = fig2_like_csv(tmp_path)
        fig = render(PlotSpec(str(csv_path), "snr_db", str(tmp_path / "o.png")))
        labels = {t.get_text() for t in fig.axes[0].get_legend().get_texts()}
        assert "proposed, SNR=5 dB" in labels
        assert "fixed_position, SNR=10 dB" in labels

    def test_header_only_renders_empty_axes_with_warning(self, tmp_path, capsys):
        path = tmp_path / "empty.csv"
        path.write_text(HEADER)
        out = tmp_path / "empty.png"
        fig = render(PlotSpec(str(path), "snr_db", str(out)))
        assert out.exists()
        assert fig.axes[0].get_legend() is None
        assert "no data rows" in capsys.readouterr().err

    def test_single_grid_point_does_not_crash(self, tmp_path):
        csv_path = fig2_like_csv(tmp_path, thetas=(0.1,))
        out = tmp_path / "point.png"
        fig = render(PlotSpec(str(csv_path), "snr_db", str(out)))
        assert out.exists()
        assert len(fig.axes[0].get_legend().get_texts()) == 6

    def test_same_csv_same_legend(self, tmp_path):
        csv_path = fig2_like_csv(tmp_path)
        spec = PlotSpec(str(csv_path), "snr_db", str(tmp_path / "a.png"))
        first = [t.get_text() for t in render(spec).axes[0].get_legend().get_texts()]
        second = [t.get_text() for t in render(spec).axes[0].get_legend().get_texts()]
        assert first == second

    def test_log_scale_default_linear_optional(self, tmp_path):
        csv_path = fig2_like_csv(tmp_path)
        fig = render(PlotSpec(str(csv_path), "snr_db", str(tmp_path / "a.png")))
        assert fig.axes[0].get_yscale() == "log"
        fig = render(PlotSpec(str(csv_path), "snr_db", str(tmp_path / "b.png"), log_y=False))
        assert fig.axes[0].get_yscale() == "linear"

    def test_missing_columns_listed(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("scheme,theta0,N\nproposed,0.1,8\n")
        with pytest.raises(SchemaError, match="mse_mean.*mse_std"):
            render(PlotSpec(str(path), "N", str(tmp_path / "o.png")))

    def test_invalid_group_column_rejected(self, tmp_path):
        with pytest.raises(SchemaError):
            PlotSpec(str(tmp_path / "x.csv"), "K", str(tmp_path / "o.png"))


class TestCli:
    def test_renders_png(self, tmp_path):
        csv_path = fig2_like_csv(tmp_path)
        out = tmp_path / "fig.png"
        assert main(["--csv", str(csv_path), "--group-by", "snr_db", "--out", str(out)]) == EXIT_OK
        assert out.exists()

    def test_missing_file_is_input_error(self, tmp_path):
        code = main(["--csv", str(tmp_path / "none.csv"), "--group-by", "N",
                     "--out", str(tmp_path / "o.png")])
        assert code == EXIT_INPUT

    def test_bad_group_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            main(["--csv", "x.csv", "--group-by", "K", "--out", "o.png"])
        assert err.value.code == EXIT_USAGE

    def test_console_entry_point(self, tmp_path):
        csv_path = fig2_like_csv(tmp_path)
        out = tmp_path / "fig.pdf"
        proc = subprocess.run(
            [sys.executable, "-m", "aircomp_plots.cli", "--csv", str(csv_path),
             "--group-by", "snr_db", "--out", str(out)],
            capture_output=True, text=True,
        )
        assert proc.returncode == EXIT_OK, proc.stderr
        assert out.exists()
