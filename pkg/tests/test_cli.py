import pytest

from obstructvc.cli import main
from obstructvc.graph import er_sample, serialize_edge_list


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def triangle(tmp_path):
    path = tmp_path / "tri.txt"
    path.write_text("0 1\n1 2\n0 2\n")
    return path


def write_config(path, **kw):
    base = dict(epochs=1, episodes_per_epoch=2, batch_size=8, p=4, T=2,
                validation_count=3, validation_n=8, k_max=2)
    base.update(kw)
    path.write_text("".join(f"{k} = {v}\n" for k, v in base.items()))
    return path


def test_gen_obstructions_k1(tmp_path, capsys):
    code, out, _ = run(["gen-obstructions", "--kmax", 1, "--out", tmp_path, "--no-plots"], capsys)
    assert code == 0
    assert (tmp_path / "obstructions_k1_connected.g6").read_text() == "Bw\n"
    assert "k=1: 1" in out


def test_gen_obstructions_k2_with_plot(tmp_path, capsys):
    code, out, _ = run(["gen-obstructions", "--kmax", 2, "--out", tmp_path], capsys)
    assert code == 0
    assert len((tmp_path / "obstructions_k2_connected.g6").read_text().splitlines()) == 2
    assert (tmp_path / "counts.csv").exists() and (tmp_path / "counts.png").exists()


def test_gen_obstructions_rejects_k0(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen-obstructions", "--kmax", "0", "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_gen_obstructions_unwritable(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(["gen-obstructions", "--kmax", 1, "--out", blocker / "sub"], capsys)
    assert code == 2 and "cannot write" in err


def test_solve_exact_triangle(triangle, capsys):
    code, out, _ = run(["solve", "--graph", triangle, "--algo", "exact"], capsys)
    assert code == 0
    assert "size: 2" in out and "optimality: proven-optimal" in out


def test_solve_approx2_triangle(triangle, capsys):
    code, out, _ = run(["solve", "--graph", triangle, "--algo", "approx2"], capsys)
    assert code == 0 and "size: 2" in out and "algorithm: matching-2approx" in out


def test_solve_prints_dimacs_labels(tmp_path, capsys):
    path = tmp_path / "s.col"
    path.write_text("c star\np edge 4 3\ne 1 2\ne 1 3\ne 1 4\n")
    code, out, _ = run(["solve", "--graph", path], capsys)
    assert code == 0 and "cover: 1\n" in out


def test_solve_model_requires_checkpoint(triangle):
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--graph", str(triangle), "--algo", "model"])
    assert exc.value.code == 2


def test_solve_parse_error(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("0 x\n")
    code, _, err = run(["solve", "--graph", path], capsys)
    assert code == 2 and "error" in err


def test_solve_budget_exceeded(tmp_path, capsys):
    path = tmp_path / "dense.txt"
    path.write_text(serialize_edge_list(er_sample(60, 0.5, 1)))
    code, _, err = run(["solve", "--graph", path, "--budget", 10], capsys)
    assert code == 3 and "unsolved" in err


def test_train_then_evaluate(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.txt")
    out = tmp_path / "run"
    code, text, _ = run(["train", "--config", cfg, "--out", out], capsys)
    assert code == 0 and "epochs: 1" in text
    assert len((out / "history.csv").read_text().splitlines()) == 2
    assert (out / "model.s2v").exists() and (out / "history.png").exists()
    assert (out / "manifest.txt").exists()

    graphs = tmp_path / "graphs"
    graphs.mkdir()
    for i in range(3):
        (graphs / f"g{i}.txt").write_text(serialize_edge_list(er_sample(10, 0.3, i)))
    csv = tmp_path / "eval" / "evaluation.csv"
    code, _, _ = run(["evaluate", "--model", out / "model.s2v", "--graphs", graphs,
                      "--out", csv], capsys)
    assert code == 0
    rows = csv.read_text().splitlines()
    assert rows[0] == "graph_name,n,m,alg1,alg2,model,exact" and len(rows) == 4
    assert csv.with_suffix(".png").exists()

    code, out_text, _ = run(["solve", "--graph", graphs / "g0.txt", "--algo", "model",
                             "--model", out / "model.s2v"], capsys)
    assert code == 0 and "algorithm: model" in out_text


def test_train_rejects_bad_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("pool_mode = random-subgraphs\n")
    code, _, err = run(["train", "--config", cfg, "--out", tmp_path / "o"], capsys)
    assert code == 2 and "target_graph" in err


def test_train_reruns_are_byte_identical(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.txt", epochs=2)
    for name in ("a", "b"):
        assert run(["train", "--config", cfg, "--out", tmp_path / name], capsys)[0] == 0
    for f in ("model.s2v", "history.csv", "manifest.txt", "history.png"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes(), f


def test_plot_history_and_info(tmp_path, triangle, capsys):
    cfg = write_config(tmp_path / "cfg.txt")
    run(["train", "--config", cfg, "--out", tmp_path, "--no-plots"], capsys)
    code, _, _ = run(["plot-history", tmp_path / "history.csv", "--out", tmp_path / "h.png"], capsys)
    assert code == 0 and (tmp_path / "h.png").exists()
    code, out, _ = run(["info", "--graph", triangle], capsys)
    assert code == 0 and "n=3 m=3" in out
