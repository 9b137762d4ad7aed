import json

from app.main import main


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_star_distance_is_printed_plain(capsys):
    assert _run(capsys, "compactify", "dist", "discrete-z", "0", "inf") == (0, "1/4\n")
    code, out = _run(capsys, "compactify", "dist", "discrete-z", "0", "1", "--json")
    assert code == 0
    assert json.loads(out) == {"value": "3/8"}


def test_group_mul(capsys):
    assert _run(capsys, "group", "mul", "z2", "1", "1") == (0, "01\n")
    assert _run(capsys, "group", "mul", "discrete-z", "2", "3") == (0, "5\n")


def test_refutation_with_trace(capsys, tmp_path):
    path = tmp_path / "trace.json"
    code, out = _run(capsys, "chabauty", "refute", "discrete-z", "--set", "1,-1,inf", "--budget", "1000",
                     "--trace", str(path))
    assert code == 0
    assert json.loads(out)["reason"] == "MISSING_IDENTITY"
    trace = json.loads(path.read_text())
    assert trace["schema_version"] == "1"
    assert trace["seed"] == 20240607
    assert trace["command"]["subcommand"] == "chabauty refute"
    assert trace["command"]["instance"] == "discrete-z"
    assert trace["command"]["budget"] == 1000
    assert trace["command"]["parameters"] == {"set": "1,-1,inf"}
    assert trace["summary"] == {"verdict": "REFUTED", "refuted": True, "steps": 15, "exit_code": 0}


def test_refute_needs_exactly_one_candidate(capsys):
    code, out = _run(capsys, "chabauty", "refute", "discrete-z")
    assert code == 2
    assert json.loads(out)["error"] == "USAGE_ERROR"


def test_groupoid_axioms_pass(capsys):
    code, out = _run(capsys, "groupoid", "check-axioms", "--depth", "3")
    assert code == 0
    report = json.loads(out)
    assert report["passed"] is True
    assert report["instance"] == "z2"


def test_unknown_instance_exits_with_usage_error(capsys):
    code, out = _run(capsys, "compactify", "dist", "nowhere", "0", "1")
    assert code == 2
    document = json.loads(out)
    assert document["error"] == "USAGE_ERROR"
    assert "discrete-z" in document["details"]["known"]


def test_bad_arguments_exit_with_two(capsys):
    assert main(["sigma"]) == 2
    assert main(["vectors", "emit", "nothing"]) == 2
    capsys.readouterr()


def test_compact_base_is_a_promise_violation(capsys):
    code, out = _run(capsys, "compactify", "h", "z2", "0")
    assert code == 1
    assert json.loads(out)["error"] == "PROMISE_VIOLATION"


def test_seed_comes_from_the_environment(capsys, tmp_path, settings_env):
    settings_env.setenv("LCLAB_SEED", "7")
    path = tmp_path / "trace.json"
    code, _ = _run(capsys, "group", "check", "z2", "--samples", "5", "--trace", str(path))
    assert code == 0
    assert json.loads(path.read_text())["seed"] == 7
    code, _ = _run(capsys, "group", "check", "z2", "--samples", "5", "--seed", "9", "--trace", str(path))
    assert json.loads(path.read_text())["seed"] == 9


def test_traces_are_byte_identical(capsys, tmp_path):
    path = tmp_path / "trace.json"
    runs = []
    for _ in range(2):
        assert _run(capsys, "group", "check", "reals", "--samples", "20", "--trace", str(path))[0] == 0
        runs.append(path.read_bytes())
    assert runs[0] == runs[1]


def test_hyper_split(capsys):
    code, out = _run(capsys, "hyper", "split", "z2", "--budget", "1000")
    assert code == 0
    assert json.loads(out)["verdict"] == "SPLIT"


def test_vectors_emit(capsys):
    code, out = _run(capsys, "vectors", "emit", "meetgroupoid")
    assert code == 0
    assert all(entry["agree"] for entry in json.loads(out))


def test_simple_group_run_with_shipped_doubles(capsys, tmp_path):
    path = tmp_path / "trace.json"
    code, out = _run(capsys, "simple-group", "run", "--stages", "200", "--trace", str(path))
    assert code == 0
    result = json.loads(out)
    assert result["oracles"] == ["constant-1", "parity", "multiples-of-first-seen", "delayed-parity(delay=2)"]
    assert result["states"] == {"R0": "WAITING_XY", "R1": "SATISFIED", "R2": "SATISFIED", "R3": "SATISFIED"}
    assert all(result["injuries"][f"R{e}"] <= e for e in range(4))
    assert result["embedding_ok"] is True and result["unverified"] == []
    assert [w["case"] for w in result["witnesses"]] == [1, 2, 1]
    case_two = result["witnesses"][1]
    assert case_two["m"] > 2 * case_two["n"]
    trace = json.loads(path.read_text())
    assert trace["command"]["subcommand"] == "simple-group run"
    assert len(trace["steps"]) == 201
    assert trace["summary"]["exit_code"] == 0
    assert trace["summary"]["free_abelian"] is True
