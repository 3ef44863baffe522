"""Командная строка: вывод, коды завершения и сообщения об ошибках"""
import json
import math

import pytest

from nonuniform_sobolev.cli import EXIT_CONFIG, EXIT_OK, main


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("RUN_SEED", raising=False)
    monkeypatch.delenv("RUN_THREADS", raising=False)


@pytest.mark.integration
class TestIndicesCommand:
    @pytest.mark.parametrize("argv, expected", [
        (["conjugate", "-N", "4", "-p", "2"], "4"),
        (["beta", "-s", "3/2", "-p", "3/2"], "5/4 (≈1.25)"),
        (["embed", "-N", "3", "-k", "1", "-p", "2,2"], "subcritical q∈[2,6]"),
        (["membership", "-N", "2", "-s", "1/2", "-p", "4,2", "-delta", "4/5"], "Member"),
    ])
    def test_text_output(self, capsys, argv, expected):
        assert main(["indices", *argv]) == EXIT_OK
        assert capsys.readouterr().out == expected + "\n"

    def test_json_output(self, capsys):
        assert main(["indices", "recursion", "-N", "3", "-p", "10,3/2", "--json"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["operation"] == "recursion"
        assert payload["value"]["fixed_point"] == "3"

    def test_precondition_violation(self, capsys):
        assert main(["indices", "conjugate", "-N", "3", "-k", "2", "-p", "2"]) == EXIT_CONFIG
        assert "[violated: k·p < N]" in capsys.readouterr().err

    def test_missing_argument(self, capsys):
        assert main(["indices", "embed", "-N", "3", "-p", "2,2"]) == EXIT_CONFIG
        assert "[field: indices.k]" in capsys.readouterr().err


@pytest.mark.integration
class TestSampleAndNorm:
    def test_sample_then_measure(self, capsys, tmp_path, gaussian_l2):
        path = tmp_path / "gauss.bin"
        csv_path = tmp_path / "gauss.csv"
        argv = ["sample", "--family", "gaussian", "--L", "4", "--n", "16", "--output", str(path), "--csv", str(csv_path)]
        assert main(argv) == EXIT_OK
        assert path.stat().st_size == 24 + 16 * 16
        assert csv_path.read_text(encoding="utf-8").startswith("x,re,im")

        capsys.readouterr()
        assert main(["norm", "lp", "--family", "file", "--input", str(path), "--no-timestamp"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["kind"] == "lp"
        assert payload["result"]["value"] == pytest.approx(gaussian_l2, rel=1e-6)

    def test_config_file_section(self, capsys, write_ini):
        path = write_ini("[global]\nformat = json\n\n[norm]\nfamily = gaussian\np = 1\n")
        assert main(["norm", "lp", "--config", str(path), "--no-timestamp"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert "generated_at" not in payload
        assert payload["config_echo"]["command"] == "norm"
        assert payload["result"]["value"] == pytest.approx(math.sqrt(math.pi), rel=1e-6)

    def test_flag_overrides_file(self, capsys, write_ini):
        path = write_ini("[norm]\np = 1\n")
        assert main(["norm", "lp", "--config", str(path), "-p", "2", "--no-timestamp"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["config_echo"]["norm"]["p"] == "2"

    def test_invalid_section_value(self, capsys, write_ini):
        path = write_ini("[norm]\nN = zero\n")
        assert main(["norm", "lp", "--config", str(path)]) == EXIT_CONFIG
        assert "[field: norm.N]" in capsys.readouterr().err

    def test_missing_config_file(self, capsys, tmp_path):
        assert main(["norm", "lp", "--config", str(tmp_path / "absent.ini")]) == EXIT_CONFIG
        assert "[field: config]" in capsys.readouterr().err

    def test_csv_levels(self, capsys):
        assert main(["norm", "lp", "--format", "csv", "--no-timestamp"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("# norm lp\n")
        assert "R,value\r\n" in out


@pytest.mark.integration
class TestExperimentCommands:
    def test_heat_json(self, capsys, tmp_path):
        output = tmp_path / "heat.json"
        argv = ["heat", "--initial", "gaussian", "-s", "1", "-p", "2,2", "--times", "0.1,1",
                "--L", "16", "--n", "256", "--no-weighted", "--output", str(output), "--no-timestamp"]
        assert main(argv) == EXIT_OK
        report = json.loads(output.read_text(encoding="utf-8"))
        assert report["name"] == "heat"
        assert report["columns"][0] == "t"
        assert [row["t"] for row in report["rows"]] == [0.0, 0.1, 1.0]
        assert report["rows"][1]["l2"] == pytest.approx((math.pi / 2) ** 0.25 * 1.4 ** -0.25, rel=1e-6)

    def test_heat_csv_comments(self, capsys):
        argv = ["heat", "-s", "1", "-p", "2,2", "--times", "0.5", "--L", "16", "--n", "256", "--no-weighted",
                "--format", "csv", "--no-timestamp"]
        assert main(argv) == EXIT_OK
        lines = capsys.readouterr().out.split("\n")
        assert lines[0] == "# heat report"
        assert any(line.startswith("# config_echo: ") for line in lines)
        assert not any("generated_at" in line for line in lines)

    def test_heat_invalid_times(self, capsys):
        assert main(["heat", "-s", "1", "-p", "2,2", "--times", "geom:1:2"]) == EXIT_CONFIG
        assert "[field: heat.times]" in capsys.readouterr().err


@pytest.mark.integration
class TestVerifyCommand:
    def test_list(self, capsys):
        assert main(["verify", "--list"]) == EXIT_OK
        names = capsys.readouterr().out.split()
        assert "acceptance.index_table" in names
        assert "property.gn_inequality" in names

    def test_selected_checks(self, capsys):
        argv = ["verify", "--checks", "acceptance.index_table,acceptance.bootstrap", "--no-timestamp"]
        assert main(argv) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["summary"] == {"pass": 2, "fail": 0, "skip": 0}

    def test_unknown_check(self, capsys):
        assert main(["verify", "--checks", "acceptance.nothing"]) == EXIT_CONFIG
        assert "[field: verify.checks]" in capsys.readouterr().err


@pytest.mark.slow
class TestDocumentedRuns:
    def test_rational_decay_member_cell(self, capsys):
        argv = ["norm", "gagliardo", "--family", "rational-decay", "--delta", "0.3", "--s", "0.4", "--p", "2",
                "--N", "1", "--no-timestamp"]
        assert main(argv) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["result"]["classification"] == "Converged"

    def test_acceptance_suite_exit_code(self, capsys):
        assert main(["verify", "--suite", "acceptance", "--threads", "2", "--no-timestamp"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["summary"]["fail"] == 0
