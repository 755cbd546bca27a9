import numpy as np
import pytest

from mvamp.cli import main, parse_grid, UsageError


def run_cli(*args):
    return main(list(args))


class TestGridParsing:
    def test_comma_list(self):
        assert parse_grid("0.5,1,2", "g") == (0.5, 1.0, 2.0)

    def test_linspace(self):
        assert parse_grid("0:1:3", "g") == (0.0, 0.5, 1.0)

    def test_rejects_garbage(self):
        with pytest.raises(UsageError):
            parse_grid("a,b", "g")


class TestTheoryCommand:
    def test_boundary_point(self, tmp_path):
        out = tmp_path / "o"
        assert run_cli("theory", "--lambda-grid", "1", "--mu-grid", "0",
                       "--c", "1", "--out-dir", str(out)) == 0
        header, row = (out / "theory.csv").read_text().splitlines()
        assert header == "lambda,mu,c,z_star,limit_mmse,detectable,xi"
        cells = row.split(",")
        assert cells[3] == "0"          # z_star
        assert cells[4] == "1"          # limit_mmse
        assert cells[5] == "false"      # detectable

    def test_no_signal_point(self, tmp_path):
        out = tmp_path / "o"
        run_cli("theory", "--lambda-grid", "0", "--mu-grid", "0", "--c", "1",
                "--out-dir", str(out))
        row = (out / "theory.csv").read_text().splitlines()[1].split(",")
        assert row[3] == "0" and row[6] == "0"  # z_star and xi

    def test_grid_enumeration_order(self, tmp_path):
        out = tmp_path / "o"
        run_cli("theory", "--lambda-grid", "0,1,2", "--mu-grid", "0,0.5,1",
                "--c", "1.5", "--out-dir", str(out))
        lines = (out / "theory.csv").read_text().splitlines()
        assert len(lines) == 10
        lams = [float(l.split(",")[0]) for l in lines[1:]]
        mus = [float(l.split(",")[1]) for l in lines[1:]]
        assert lams == [0, 0, 0, 1, 1, 1, 2, 2, 2]
        assert mus == [0, 0.5, 1] * 3

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            run_cli("theory", "--lambda-grid", "0.5:3:6", "--mu-grid", "0,1",
                    "--c", "2", "--out-dir", str(out))
        assert (a / "theory.csv").read_bytes() == (b / "theory.csv").read_bytes()

    def test_missing_args_is_usage_error(self, tmp_path):
        assert run_cli("theory", "--mu-grid", "1", "--c", "1",
                       "--out-dir", str(tmp_path / "x")) == 1

    def test_revelation_fraction_raises_fixed_point(self, tmp_path):
        # z_star is evaluated at the requested eps; the limit columns stay
        # at their eps = 0 definitions
        out = tmp_path / "o"
        run_cli("theory", "--lambda-grid", "0.5", "--mu-grid", "0.5", "--c", "1",
                "--eps", "0.3", "--out-dir", str(out))
        row = (out / "theory.csv").read_text().splitlines()[1].split(",")
        assert float(row[3]) >= 0.3   # z_star with revelation
        assert row[4] == "1"          # limit_mmse: subcritical without it


class TestSimulateCommand:
    ARGS = ("simulate", "--family", "gaussian", "--n", "200", "--p", "120",
            "--sweep", "lambda", "--grid", "3.0", "--fixed", "0.9",
            "--replicates", "2", "--n-iter", "15", "--seed", "5")

    def test_runs_and_writes_outputs(self, tmp_path):
        out = tmp_path / "o"
        assert run_cli(*self.ARGS, "--out-dir", str(out), "--svg",
                       "--export-instance") == 0
        text = (out / "results.csv").read_text()
        header = text.splitlines()[0]
        assert header == ("family,n,p,lambda,mu,c,replicates,theory_mmse,"
                          "mean_mse,sd_mse,min_mse,max_mse,mean_overlap,errors")
        assert text.endswith("\n") and "\r" not in text
        assert (out / "timings.csv").exists()
        assert (out / "plot.svg").read_text().startswith("<svg")
        assert (out / "labels.csv").exists()
        assert (out / "covariates.csv").exists()
        assert (out / "config_used.ini").exists()

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            run_cli(*self.ARGS, "--out-dir", str(out))
        assert (a / "results.csv").read_bytes() == (b / "results.csv").read_bytes()

    def test_twelve_significant_digits(self, tmp_path):
        out = tmp_path / "o"
        run_cli(*self.ARGS, "--out-dir", str(out))
        row = (out / "results.csv").read_text().splitlines()[1]
        theory = row.split(",")[7]
        assert len(theory.replace(".", "").replace("-", "").lstrip("0")) >= 11

    def test_config_file_with_flag_override(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text(
            "[common]\nseed = 5\n\n[simulate]\nfamily = gaussian\nn = 200\n"
            "p = 120\nsweep = lambda\ngrid = 3.0\nfixed = 0.9\n"
            "replicates = 2\nn-iter = 15\n")
        a = tmp_path / "a"
        assert run_cli("simulate", "--config", str(ini), "--out-dir", str(a)) == 0
        b = tmp_path / "b"
        run_cli(*self.ARGS, "--out-dir", str(b))
        assert (a / "results.csv").read_bytes() == (b / "results.csv").read_bytes()
        # flag overrides the file value -> different seed -> different numbers
        c = tmp_path / "c"
        run_cli("simulate", "--config", str(ini), "--seed", "6", "--out-dir", str(c))
        assert (a / "results.csv").read_bytes() != (c / "results.csv").read_bytes()

    def test_malformed_config_names_key(self, tmp_path, capsys):
        ini = tmp_path / "bad.ini"
        ini.write_text("[simulate]\nreplicates = soon\n")
        code = run_cli("simulate", "--config", str(ini),
                       "--out-dir", str(tmp_path / "o"))
        assert code == 1
        assert "replicates" in capsys.readouterr().err

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        ini = tmp_path / "bad.ini"
        ini.write_text("[simulate]\nrepliactes = 3\n")
        assert run_cli("simulate", "--config", str(ini),
                       "--out-dir", str(tmp_path / "o")) == 1
        assert "repliactes" in capsys.readouterr().err

    def test_bad_family_is_usage_error(self, tmp_path):
        assert run_cli("simulate", "--family", "gaussian", "--n", "200", "--p", "120",
                       "--sweep", "lambda", "--grid", "-3.0", "--fixed", "0.9",
                       "--out-dir", str(tmp_path / "o")) == 1

    def test_revelation_init_end_to_end(self, tmp_path):
        out = tmp_path / "o"
        assert run_cli("simulate", "--family", "gaussian", "--n", "200", "--p", "120",
                       "--sweep", "lambda", "--grid", "2.0", "--fixed", "1.0",
                       "--replicates", "2", "--n-iter", "10", "--seed", "2",
                       "--init", "revelation", "--eps", "0.2",
                       "--out-dir", str(out)) == 0
        row = (out / "results.csv").read_text().splitlines()[1]
        assert float(row.split(",")[8]) < 1.0  # mean mse: revelation helps

    def test_svg_is_well_formed(self, tmp_path):
        import xml.etree.ElementTree as ET
        out = tmp_path / "o"
        run_cli(*self.ARGS, "--grid", "2.0,3.0", "--out-dir", str(out), "--svg")
        root = ET.parse(out / "plot.svg").getroot()
        assert root.tag.endswith("svg")


class TestSeCheckCommand:
    def test_full_revelation_gaps_zero(self, tmp_path):
        out = tmp_path / "o"
        assert run_cli("se-check", "--lambda", "2", "--mu", "1", "--c", "1",
                       "--eps", "1.0", "--n", "150", "--t-max", "3",
                       "--replicates", "2", "--out-dir", str(out)) == 0
        lines = (out / "se_check.csv").read_text().splitlines()
        assert lines[0] == "t,z_t_theory,mean_overlap_empirical,abs_gap"
        assert len(lines) == 4  # header plus t = 1..3
        for line in lines[1:]:
            assert float(line.split(",")[3]) < 1e-12

    def test_single_step_gives_single_row(self, tmp_path):
        out = tmp_path / "o"
        run_cli("se-check", "--lambda", "1", "--mu", "0.5", "--c", "1",
                "--eps", "0.2", "--n", "120", "--t-max", "1",
                "--replicates", "1", "--out-dir", str(out))
        lines = (out / "se_check.csv").read_text().splitlines()
        assert len(lines) == 2
        assert lines[1].startswith("1,")

    def test_requires_positive_eps(self, tmp_path):
        assert run_cli("se-check", "--lambda", "1", "--mu", "1", "--c", "1",
                       "--eps", "0", "--n", "100", "--t-max", "2",
                       "--replicates", "1", "--out-dir", str(tmp_path / "o")) == 1

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            run_cli("se-check", "--lambda", "2", "--mu", "1", "--c", "1",
                    "--eps", "0.3", "--n", "150", "--t-max", "3",
                    "--replicates", "2", "--seed", "9", "--out-dir", str(out))
        assert (a / "se_check.csv").read_bytes() == (b / "se_check.csv").read_bytes()


def test_no_subcommand_is_usage_error():
    assert run_cli() == 1


def test_unknown_subcommand_is_usage_error():
    assert run_cli("frobnicate") == 1
