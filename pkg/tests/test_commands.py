import csv
from pathlib import Path

from mppa import create_app
from mppa.experiment import FAIL, VIOLATION

from tests.conftest import EXPERIMENTS, experiment_text

EXPERIMENT_A = str(EXPERIMENTS / "experiment_a.cfg")
NEGATIVE = str(EXPERIMENTS / "negative_control.cfg")


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def write_config(tmp_path, name, text):
    path = tmp_path / f"{name}.cfg"
    path.write_text(text, encoding="utf-8")
    return str(path)


# -- bound ------------------------------------------------------------------

def test_bound_zeta(runner):
    result = runner.invoke(args=["bound", EXPERIMENT_A, "zeta", "--k", "0", "--n", "5"])
    assert result.exit_code == 0, result.output
    assert result.output == "name,k,f_spec,value\nzeta,0,n=5,0\n"


def test_bound_sigma(runner):
    # D = 4 * 8^2, ceil ln 1024 = 7, L(7) = ceil(4 e^7) = 4387
    result = runner.invoke(args=["bound", EXPERIMENT_A, "sigma"])
    assert result.output.splitlines()[1] == "sigma,0,n=0,4388"


def test_bound_R_and_nu(runner):
    assert runner.invoke(args=["bound", EXPERIMENT_A, "R", "--k", "1", "--t", "2"]).output.splitlines()[1] == "R,1,t=2,80"
    assert runner.invoke(args=["bound", EXPERIMENT_A, "nu", "--k", "1"]).output.splitlines()[1] == "nu,1,,416"


def test_bound_phi_exceeds_budget(runner):
    result = runner.invoke(args=["bound", EXPERIMENT_A, "phi", "--k", "1", "--fspec", "id"])
    assert result.exit_code == 0
    assert result.output.splitlines()[1].startswith("phi,1,id,BUDGET_EXCEEDED(")


def test_bound_rejects_unknown_name_and_fspec(runner):
    assert runner.invoke(args=["bound", EXPERIMENT_A, "omega"]).exit_code == 2
    assert runner.invoke(args=["bound", EXPERIMENT_A, "chi0", "--fspec", "exp 2"]).exit_code == 2


def test_budget_override_from_app_config():
    runner = create_app({"BUDGET_BITS": "64", "LOG_LEVEL": "WARNING"}).test_cli_runner()
    result = runner.invoke(args=["bound", EXPERIMENT_A, "R", "--t", "100"])
    assert result.output.splitlines()[1] == "R,0,t=100,BUDGET_EXCEEDED(R)"


# -- oracle -----------------------------------------------------------------

def test_oracle_single_lemma(runner):
    result = runner.invoke(args=["oracle", "--lemma", "ratap", "--trials", "50", "--seed", "7"])
    assert result.exit_code == 0, result.output
    assert result.output == "lemma,trials,passed,verdict\nratap,50,50,PASS\n"


def test_oracle_zero_trials_pass(runner):
    result = runner.invoke(args=["oracle", "--trials", "0"])
    assert result.exit_code == 0
    rows = result.output.splitlines()[1:]
    assert [row.split(",")[0] for row in rows] == ["ratap", "limsup2", "xu", "suzuki1", "suzuki2"]
    assert all(row.endswith(",0,0,PASS") for row in rows)


def test_oracle_unknown_lemma(runner):
    assert runner.invoke(args=["oracle", "--lemma", "banach"]).exit_code == 2


# -- run --------------------------------------------------------------------

def test_run_small_experiment(runner, app, small_experiment):
    result = runner.invoke(args=["run", str(small_experiment)])
    assert result.exit_code == 0, result.output
    out = Path(app.config["OUTPUT_DIR"]) / "small_a"
    assert result.output.strip().endswith(str(out))
    for table in ("trace", "metastability", "regularity", "checks"):
        assert (out / f"{table}.csv").exists()

    assert len(read_csv(out / "trace.csv")) == 301
    checks = {row["check"]: row["status"] for row in read_csv(out / "checks.csv")}
    assert FAIL not in checks.values()
    assert checks["boundedness"] == "PASS" and checks["convergence_trend"] == "PASS"
    meta = read_csv(out / "metastability.csv")
    assert len(meta) == 3 * 2
    assert VIOLATION not in {row["verdict"] for row in meta}
    assert len(read_csv(out / "regularity.csv")) == 3 * 2 * 3


def test_run_is_deterministic(runner, small_experiment, tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    runner.invoke(args=["run", str(small_experiment), "--out", str(first)])
    runner.invoke(args=["run", str(small_experiment), "--out", str(second)])
    for table in ("trace", "metastability", "regularity", "checks"):
        assert (first / "small_a" / f"{table}.csv").read_bytes() == (second / "small_a" / f"{table}.csv").read_bytes()


def test_run_horizon_zero(runner, tmp_path):
    path = write_config(tmp_path, "still", experiment_text(horizon=0))
    result = runner.invoke(args=["run", path, "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert len((tmp_path / "still" / "trace.csv").read_text().splitlines()) == 2
    assert read_csv(tmp_path / "still" / "metastability.csv") == []


def test_run_negative_control_fails(runner, tmp_path):
    result = runner.invoke(args=["run", NEGATIVE, "--out", str(tmp_path)])
    assert result.exit_code == 1
    checks = {row["check"]: row["status"] for row in read_csv(tmp_path / "negative_control" / "checks.csv")}
    assert checks["boundedness"] == FAIL
    assert checks["moduli_constants"] == FAIL


def test_run_rejects_bad_config(runner, tmp_path):
    result = runner.invoke(args=["run", write_config(tmp_path, "empty", "")])
    assert result.exit_code == 2
    assert "missing section [problem]" in result.output


def test_run_rejects_blocking_moduli(runner, tmp_path):
    text = experiment_text(horizon=100).replace("gamma = constant 1/2", "gamma = constant 1/3")
    result = runner.invoke(args=["run", write_config(tmp_path, "q3", text)])
    assert result.exit_code == 2
    assert "Q3" in result.output


def test_run_respects_horizon_limit(small_experiment):
    runner = create_app({"MAX_HORIZON": 100, "LOG_LEVEL": "WARNING"}).test_cli_runner()
    result = runner.invoke(args=["run", str(small_experiment)])
    assert result.exit_code == 2
    assert "exceeds the limit 100" in result.output


# -- verify -----------------------------------------------------------------

def test_verify_small_experiment(runner, small_experiment):
    result = runner.invoke(args=["verify", str(small_experiment)])
    rows = dict(line.split(",", 2)[:2] for line in result.output.splitlines()[1:])
    assert list(rows) == ["1", "2", "3", "4", "5", "6", "7"]
    assert rows["2"] == "SKIP"
    assert result.exit_code == 0, result.output
