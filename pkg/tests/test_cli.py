import json

import pytest

from cli import ExitCode, build_parser, invocation_seed, main
from conftest import TEST_SEED


@pytest.fixture
def small_env(monkeypatch):
    monkeypatch.setenv("SL_RANGE_BITS", "5")
    monkeypatch.setenv("SL_BSGS_BOUND", "256")
    monkeypatch.setenv("SL_LOG_LEVEL", "WARNING")


def run(capsys, *argv, seed=None):
    code = main(["--json", *argv], seed=seed)
    out = capsys.readouterr().out.strip().splitlines()
    return code, json.loads(out[-1])


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_invocation_seed_depends_on_arguments():
    assert invocation_seed(1, ["register", "--label", "a"]) == invocation_seed(1, ["register", "--label", "a"])
    assert invocation_seed(1, ["register", "--label", "a"]) != invocation_seed(1, ["register", "--label", "b"])
    assert invocation_seed(1, ["x"]) != invocation_seed(2, ["x"])


def test_setup_and_keygen(tmp_path, capsys, small_env):
    pp_file, keys_file, public_file = tmp_path / "pp.json", tmp_path / "keys.json", tmp_path / "auditor.json"
    code, body = run(capsys, "setup", "--out", str(pp_file))
    assert code == ExitCode.OK and body["curve_id"] == "BLS12-381"
    code, body = run(
        capsys, "auditor-keygen", "--pp", str(pp_file), "--keys", str(keys_file), "--public", str(public_file)
    )
    assert code == ExitCode.OK
    assert set(json.loads(keys_file.read_text())) == {"mk", "x", "T", "X"}
    assert set(json.loads(public_file.read_text())) == {"T", "X"}


def test_seed_comes_only_from_the_caller(tmp_path, capsys, small_env, monkeypatch):
    monkeypatch.setenv("SL_SEED", "7")
    pp_file, keys_file = str(tmp_path / "pp.json"), str(tmp_path / "keys.json")
    assert run(capsys, "setup", "--out", pp_file)[0] == 0
    keygen = ["auditor-keygen", "--pp", pp_file, "--keys", keys_file, "--public", str(tmp_path / "auditor.json")]

    generated = []
    for _ in range(2):
        assert run(capsys, *keygen)[0] == 0
        generated.append(json.loads(open(keys_file).read()))
    assert generated[0] != generated[1]

    seeded_keys = []
    for _ in range(2):
        assert run(capsys, *keygen, seed=7)[0] == 0
        seeded_keys.append(json.loads(open(keys_file).read()))
    assert seeded_keys[0] == seeded_keys[1]


def test_missing_file(tmp_path, capsys, small_env):
    code, body = run(capsys, "auditor-keygen", "--pp", str(tmp_path / "absent.json"))
    assert code == ExitCode.MISSING_FILE == 3
    assert body["reason"] == "missing-file"


def test_malformed_params(tmp_path, capsys, small_env):
    pp_file = tmp_path / "pp.json"
    pp_file.write_text('{"curve_id": "BLS12-381", "security_level": 128, "G1": "00", "G2": "00"}')
    code, body = run(capsys, "auditor-keygen", "--pp", str(pp_file))
    assert code == ExitCode.MALFORMED == 4
    pp_file.write_text("not json")
    code, _ = run(capsys, "auditor-keygen", "--pp", str(pp_file))
    assert code == ExitCode.MALFORMED


def test_bad_configuration(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SL_RANGE_BITS", "100")
    assert main(["setup", "--out", str(tmp_path / "pp.json")]) == ExitCode.MALFORMED


def test_human_output(tmp_path, capsys, small_env):
    assert main(["setup", "--out", str(tmp_path / "pp.json")]) == 0
    assert capsys.readouterr().out.startswith("[+] setup: ok")
    assert main(["auditor-keygen", "--pp", str(tmp_path / "missing.json")]) == 3
    assert capsys.readouterr().err.startswith("[!] auditor-keygen: missing-file")


@pytest.mark.slow
def test_end_to_end(tmp_path, capsys, small_env):
    names = ("pp.json", "keys.json", "auditor.json", "ledger.bin", "other_keys.json")
    files = {name: str(tmp_path / name) for name in names}

    def cli(*argv):
        return run(capsys, *argv, seed=TEST_SEED)

    alice, bob, tx_file = str(tmp_path / "alice.json"), str(tmp_path / "bob.json"), str(tmp_path / "tx.bin")
    common = ["--pp", files["pp.json"], "--ledger", files["ledger.bin"]]
    auditor = ["--keys", files["keys.json"]]
    public = ["--auditor", files["auditor.json"]]

    assert cli("setup", "--out", files["pp.json"])[0] == 0
    keygen = ["auditor-keygen", "--pp", files["pp.json"], "--keys", files["keys.json"]]
    keygen += ["--public", files["auditor.json"]]
    assert cli(*keygen)[0] == 0
    assert cli("register", *common, *auditor, "--label", "alice", "--out", alice)[0] == 0
    assert cli("register", *common, *auditor, "--label", "bob", "--out", bob)[0] == 0
    code, body = cli("register", *common, *auditor, "--label", "bob", "--out", str(tmp_path / "b2.json"))
    assert code == ExitCode.ERROR and body["reason"] == "DuplicateRegistrationError"

    for amount in ("5", "7"):
        assert cli("mint", *common, *auditor, "--to", "alice", "--amount", amount)[0] == 0
    code, body = cli("mint", *common, *auditor, "--to", "carol", "--amount", "1")
    assert code == ExitCode.ERROR and body["reason"] == "unknown-payee"

    code, body = cli("scan", *common, *public, "--user", alice)
    assert code == 0 and body["balance"] == 12

    code, body = cli("pay", *common, *public, "--user", alice, "--to", "bob:9", "--to", "alice:4", "--out", tx_file)
    assert code == ExitCode.ERROR and body["reason"] == "ImbalanceError"
    code, body = cli("pay", *common, *public, "--user", alice, "--to", "bob-9", "--to", "alice:3")
    assert code == ExitCode.MALFORMED
    code, body = cli("pay", *common, *public, "--user", alice, "--to", "bob:9", "--to", "alice:3", "--out", tx_file)
    assert code == 0

    # Flip the low byte of the first SoK response.
    data = bytearray(open(tx_file, "rb").read())
    data[4 * 96 + 2 + 2 * 32 - 1] ^= 1
    tampered = str(tmp_path / "tampered.bin")
    open(tampered, "wb").write(bytes(data))
    code, body = cli("verify", *common, *public, "--tx", tampered)
    assert code == ExitCode.REJECTED == 5 and body["reason"] == "sok-challenge-mismatch"
    open(tampered, "wb").write(bytes(data[:-3]))
    assert cli("verify", *common, *public, "--tx", tampered)[0] == ExitCode.MALFORMED

    assert cli("verify", *common, *public, "--tx", tx_file, "--dry-run")[0] == 0
    code, body = cli("verify", *common, *public, "--tx", tx_file)
    assert code == 0 and body["result"] == "accepted"
    code, body = cli("verify", *common, *public, "--tx", tx_file)
    assert code == ExitCode.REJECTED and body["reason"] == "double-spend"

    code, body = cli("trace", *common, *auditor, "--tx", tx_file, "--index", "1")
    assert code == 0 and (body["label"], body["amount"]) == ("bob", 9)
    code, body = cli("trace", *common, *auditor, "--tx", tx_file, "--index", "2")
    assert code == 0 and (body["label"], body["amount"]) == ("alice", 3)

    code, body = cli("scan", *common, *public, "--user", bob)
    assert body["balance"] == 9
    code, body = cli("scan", *common, *public, "--user", alice)
    assert body["balance"] == 3

    # Another auditor's mk cannot open the outputs; the ledger still loads under its own keys.
    other_public = str(tmp_path / "other_auditor.json")
    other_keygen = ["auditor-keygen", "--pp", files["pp.json"], "--keys", files["other_keys.json"]]
    assert cli(*other_keygen, "--public", other_public)[0] == 0
    other = ["--keys", files["other_keys.json"]]
    code, body = cli("trace", *common, *other, "--tx", tx_file, "--index", "1")
    assert code == ExitCode.TRACE_FAILED == 6
    assert body["reason"] in ("amount-not-found", "unknown-address")
    code, body = cli("scan", *common, *other, "--user", bob)
    assert code == ExitCode.MALFORMED and "other auditor keys" in body["detail"]
