"""CLI tests: verb behavior, exit codes, and output formats.

``main`` is called in-process (it returns the exit code), so stdout/stderr are
captured with capsys; one test shells out to the installed ``proxsamp``
console script to validate the packaging entry point.
"""

import dataclasses
import json
import shutil
import subprocess

import pytest

from proxsamp.bench import PLOT_CSV_HEADER, format_rows_csv
from proxsamp.cli import main
from proxsamp.schedules import ScheduleInputs, derive_mala_schedule, derive_sgld_schedule

from test_bench import make_row

pytestmark = pytest.mark.filterwarnings("ignore::UserWarning")


def test_run_verb_writes_artifacts_and_prints_best_lines(
    tmp_path, isolated_cache, tiny_config_text, capsys
):
    cfg = tmp_path / "bench.cfg"
    cfg.write_text(tiny_config_text())
    assert main(["run", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert f"wrote {tmp_path / 'rows.csv'} (12 rows)" in out
    assert f"wrote {tmp_path / 'summary.json'}" in out
    for alg in ("sgld", "sps-mala", "sps-sgld"):
        assert f"best {alg}:" in out
    assert "mean_tv=" in out and "stderr=" in out
    assert (tmp_path / "rows.csv").exists()
    assert (tmp_path / "summary.json").exists()


def test_reference_verb_builds_then_loads_cache(tmp_path, tiny_config_text, capsys):
    cfg = tmp_path / "bench.cfg"
    cfg.write_text(tiny_config_text())
    cache = tmp_path / "cache"
    assert main(["reference", str(cfg), "--cache-dir", str(cache)]) == 0
    first = capsys.readouterr().out
    assert "reference: " in first and str(cache) in first
    assert "particles: 2000 x 2" in first
    assert "from_cache: no" in first
    assert main(["reference", str(cfg), "--cache-dir", str(cache)]) == 0
    second = capsys.readouterr().out
    assert "from_cache: yes" in second
    assert "accept_rate: " in second


def test_plotdata_verb_stdout_and_file_output(tmp_path, capsys):
    rows_path = tmp_path / "rows.csv"
    rows_path.write_text(
        format_rows_csv(
            [
                make_row(h=0.1, seed=0, tv_aggregate=0.5),
                make_row(h=0.1, seed=1, tv_aggregate=0.7),
            ]
        )
    )
    assert main(["plotdata", str(rows_path), "--axis", "step-size"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == PLOT_CSV_HEADER
    assert out.splitlines()[1] == "sgld,0.1,0.6,0.1"

    out_path = tmp_path / "plot.csv"
    assert main(["plotdata", str(rows_path), "--axis", "step-size", "--out", str(out_path)]) == 0
    assert f"wrote {out_path}" in capsys.readouterr().out
    assert out_path.read_text().splitlines()[0] == PLOT_CSV_HEADER


def test_schedule_verb_matches_library_derivations(capsys):
    args = ["smoothness=5", "alpha=0.5", "sigma2=1", "dim=10", "epsilon=0.1"]
    assert main(["schedule", *args]) == 0
    payload = json.loads(capsys.readouterr().out)
    inputs = ScheduleInputs(smoothness=5, alpha=0.5, sigma2=1, dim=10, epsilon=0.1)
    assert payload["inputs"] == json.loads(json.dumps(dataclasses.asdict(inputs)))
    assert payload["sgld"] == json.loads(json.dumps(dataclasses.asdict(derive_sgld_schedule(inputs))))
    assert payload["mala"] == json.loads(json.dumps(dataclasses.asdict(derive_mala_schedule(inputs))))


def test_schedule_verb_kind_filter_and_multipliers(capsys):
    base = ["smoothness=5", "alpha=0.5", "sigma2=1", "dim=10", "epsilon=0.1"]
    assert main(["schedule", *base, "kind=sgld"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert "sgld" in payload and "mala" not in payload

    assert main(["schedule", *base, "kind=sgld", "mult.tau=2.0"]) == 0
    doubled = json.loads(capsys.readouterr().out)
    assert doubled["sgld"]["tau"] == pytest.approx(2.0 * payload["sgld"]["tau"], rel=1e-12)
    assert doubled["sgld"]["tau_prime"] == pytest.approx(payload["sgld"]["tau_prime"], rel=1e-12)


def test_schedule_verb_reports_out_of_regime_as_error_entry(capsys):
    # epsilon this large makes the accuracy logarithms non-positive; the verb
    # must still exit 0 and carry the explanation in the JSON.
    assert main(["schedule", "smoothness=1", "alpha=1", "sigma2=0", "dim=1", "epsilon=10"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert "error" in payload["sgld"]
    assert "error" in payload["mala"]


@pytest.mark.parametrize(
    ("argv", "fragment"),
    [
        (["run", "/nonexistent/nowhere.cfg"], "error:"),
        (["plotdata", "/nonexistent/rows.csv", "--axis", "step-size"], "error:"),
        (["schedule", "smoothness=5"], "missing required"),
        (["schedule", "smoothness=5", "bogus=1"], "unknown schedule input"),
    ],
)
def test_failures_exit_1_with_error_on_stderr(argv, fragment, capsys):
    assert main(argv) == 1
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert fragment.replace("error:", "") in err


def test_bad_config_exits_1_naming_the_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("algorithms = sgld\nseeds = 0\ntarget.dim = 2\nsgld.step = 0.5\nbogus = 1\n")
    assert main(["run", str(cfg)]) == 1
    assert "bogus" in capsys.readouterr().err


def test_usage_errors_exit_2(capsys):
    assert main([]) == 2
    assert main(["bogusverb"]) == 2
    assert main(["plotdata", "rows.csv", "--axis", "bogus"]) == 2
    capsys.readouterr()  # swallow argparse usage text


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
    out = capsys.readouterr().out
    for verb in ("run", "reference", "plotdata", "schedule"):
        assert verb in out


def test_console_script_is_installed():
    exe = shutil.which("proxsamp")
    assert exe is not None, "console script 'proxsamp' not on PATH"
    proc = subprocess.run([exe, "--help"], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "plotdata" in proc.stdout
