import json
import math

import pytest
from click.testing import CliRunner

from boundarylab.cli import EXIT_USAGE, EXIT_VERDICT, cli, main


def run(args):
    res = CliRunner().invoke(main, args)
    return res.exit_code, res.output


def records(output):
    return [json.loads(line) for line in output.splitlines() if line.strip()]


def test_help_lists_exit_codes():
    code, out = run(["--help"])
    assert code == 0
    assert "Exit codes" in out and "walk" in out and "cogrowth" in out


def test_exponent_command():
    code, out = run(["--space", "f2", "exponent", "--nmax", "14"])
    assert code == 0
    recs = records(out)
    assert all(r["schema_version"] == 1 for r in recs)
    assert recs[0]["kind"] == "config"
    final = recs[-1]
    assert abs(final["omega_hat"] - math.log(3)) < 0.025


def test_csv_output():
    code, out = run(["--format", "csv", "exponent", "--nmax", "4"])
    assert code == 0
    assert "schema_version,kind,n,count,quotient,log_ratio" in out


def test_config_round_trip(tmp_path):
    code, out = run(["--seed", "3", "myrberg", "--length", "2000"])
    assert code == 0
    cfg = tmp_path / "cfg.json"
    cfg.write_text(out.splitlines()[0])
    code2, out2 = run(["--config", str(cfg), "myrberg"])
    assert code2 == 0 and out2 == out


def test_yaml_config_and_schema_errors(tmp_path):
    good = tmp_path / "good.yaml"
    good.write_text("space: {family: free, rank: 2}\nparams: {nmax: 6}\n")
    code, out = run(["--config", str(good), "exponent"])
    assert code == 0 and records(out)[-1]["n_max"] == 6
    bad = tmp_path / "bad.yaml"
    bad.write_text("space: {family: free, rank: x}\n")
    assert cli(["--config", str(bad), "exponent"]) == 2
    typo = tmp_path / "typo.yaml"
    typo.write_text("spaec: f2\n")
    assert cli(["--config", str(typo), "exponent"]) == 2


def test_exit_codes(capsys):
    assert cli(["--bogus"]) == EXIT_USAGE
    assert cli(["--space", "z2", "certify", "--axis", "a", "--C", "2", "--radius", "6"]) == EXIT_VERDICT
    assert cli(["certify", "--axis", "a b", "--C", "0", "--radius", "5"]) == 0
    assert cli(["space", "--word", "a ^ q"]) == 2
    assert cli(["--space", "z2", "psmeasure", "--mode", "exact"]) == 4
    assert cli(["--help"]) == 0


@pytest.mark.parametrize("args", [
    ["space", "--nmax", "3", "--word", "a b a^-1"],
    ["barriers", "--geodesic", "(a b)^4", "--F", "a b", "--truncate"],
    ["pcomplex", "--Rfam", "1", "--spheres", "3", "--series", "1.0986", "--delta"],
    ["spheres", "--Rfam", "1", "--nmax", "3"],
    ["horo", "--y", "a^5", "--R", "1"],
    ["horo", "--sequence", "a^3,a^4,a^5,a^6,a^7", "--R", "2"],
    ["shadow", "--target", "a^2", "--test", "a^2 b,b^3", "--radius", "3"],
    ["nsdyn", "--h", "a b", "--U", "(a b)^3", "--V", "(a b)^-3", "--samples", "30"],
    ["psmeasure", "--R", "8", "--target", "a,b"],
    ["shadowlemma", "--mode", "exact", "--n1", "1", "--n2", "4"],
    ["hts", "--R", "20", "--F", "(a b)^2"],
    ["cogrowth", "--nmax", "12", "--audit-n", "4"],
    ["walk", "--steps", "2000", "--seeds", "2"],
])
def test_every_subcommand_runs(args):
    code, out = run(args)
    assert code == 0, out
    recs = records(out)
    assert recs[0]["kind"] == "config" and len(recs) > 1


def test_walk_records_seed_and_flags():
    code, out = run(["--seed", "11", "walk", "--steps", "3000"])
    rec = records(out)[-1]
    assert rec["seed"] == 11 and "stabilized" in rec and "myrberg" in rec
    assert abs(rec["drift"] - 0.5) < 0.1
