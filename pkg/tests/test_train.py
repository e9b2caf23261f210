import numpy as np
import pytest

from obstructvc.canon import canonical_form
from obstructvc.graph import complete_graph, cycle_graph, empty_graph
from obstructvc.obstructions import generate_up_to
from obstructvc.solvers import APPROX2, EXACT, GREEDY, MODEL
from obstructvc.s2v import ModelParams, greedy_cover
from obstructvc.train import (ConfigError, EvalReport, GraphRecord, PoolError, TrainConfig,
                              build_pool, evaluate, mse, parse_config, read_history_csv, train,
                              validation_set, write_evaluation_csv, write_history_csv)


def small_config(**kw):
    base = dict(epochs=3, episodes_per_epoch=4, batch_size=16, p=8, T=2,
                validation_count=5, validation_n=10, k_max=2)
    base.update(kw)
    return TrainConfig(**base)


def test_pool_obstructions_in_memory():
    pool = build_pool(TrainConfig(k_min=1, k_max=2))
    codes = {canonical_form(g) for g in pool}
    assert {canonical_form(complete_graph(k)) for k in (3, 4)} | {canonical_form(cycle_graph(5))} <= codes


def test_pool_obstructions_from_disk(tmp_path):
    generate_up_to(3, out_dir=tmp_path)
    pool = build_pool(TrainConfig(k_min=2, k_max=3, obstruction_dir=str(tmp_path)))
    assert len(pool) == 2 + 3
    with pytest.raises(PoolError, match="missing"):
        build_pool(TrainConfig(k_min=99, k_max=99, obstruction_dir=str(tmp_path)))


def test_pool_missing_level_without_directory():
    with pytest.raises(PoolError, match="missing"):
        build_pool(TrainConfig(k_min=99, k_max=99))


def test_pool_random_subgraphs_of_cycle(tmp_path):
    path = tmp_path / "c10.txt"
    path.write_text("".join(f"{i} {(i + 1) % 10}\n" for i in range(10)))
    cfg = TrainConfig(pool_mode="random-subgraphs", target_graph=str(path),
                      subgraph_min=4, subgraph_max=4, subgraph_pool_size=50)
    pool = build_pool(cfg)
    assert len(pool) == 50
    for g in pool:
        assert g.n == 4 and g.m <= 3
        assert max(g.degrees()) <= 2  # induced subgraphs of a cycle are unions of paths
    assert [h.edges() for h in build_pool(cfg)] == [h.edges() for h in pool]


def test_pool_size_asymmetry():
    obstruction_pool = build_pool(TrainConfig(k_min=1, k_max=4))
    assert len(obstruction_pool) <= 0.01 * 10000


def test_config_validation_collects_errors():
    with pytest.raises(ConfigError) as exc:
        parse_config("pool_mode = random-subgraphs\nepochs = 0\nbogus = 1\nbatch_size = x\n")
    assert len(exc.value.errors) == 2  # unknown key and bad int reported before field checks
    with pytest.raises(ConfigError) as exc:
        parse_config("pool_mode = random-subgraphs\nepochs = 0\n")
    msgs = "\n".join(exc.value.errors)
    assert "target_graph" in msgs and "epochs" in msgs


def test_config_parse_values():
    cfg = parse_config("# comment\nepochs = 7\nlearning_rate = 0.5  # trailing\nobstruction_dir = none\n")
    assert cfg.epochs == 7 and cfg.learning_rate == 0.5 and cfg.obstruction_dir is None


def test_evaluate_examples():
    P = ModelParams.init(8, 2, 0)
    report = evaluate(P, [complete_graph(2), empty_graph(3), complete_graph(4)])
    k2, empty, k4 = report.graphs
    assert k2.sizes == {GREEDY: 1, APPROX2: 2, MODEL: 1} and k2.exact == 1
    assert empty.sizes == {GREEDY: 0, APPROX2: 0, MODEL: 0} and empty.exact == 0
    assert k4.sizes[GREEDY] == 3 and k4.sizes[APPROX2] == 4 and k4.exact == 3


def test_evaluate_records_missing_exact():
    from obstructvc.graph import er_sample
    report = evaluate(None, [er_sample(60, 0.5, 1)], budget=10)
    assert report.graphs[0].exact is None


def record(name, alg, exact):
    return GraphRecord(name, 0, 0, {GREEDY: alg}, exact)


def test_mse_examples():
    r = EvalReport([record("a", 3, 3), record("b", 4, 4)])
    assert mse(r, GREEDY) == 0
    r = EvalReport([record("a", 3, 3), record("b", 4, 3)])
    assert mse(r, GREEDY) == 0.5
    assert mse(r, EXACT) == 0
    with pytest.raises(ValueError):
        mse(EvalReport([record("a", 3, None)]), GREEDY)


def test_train_single_epoch():
    best, report = train(small_config(epochs=1))
    assert len(report.history) == 1
    assert report.history[0]["epoch"] == 1
    assert isinstance(best, ModelParams)


def test_train_selects_best_and_is_deterministic():
    cfg = small_config(epochs=4)
    best, report = train(cfg)
    means = [r["validation_mean_cover"] for r in report.history]
    best_mean = min([report.initial_validation_mean] + means)
    val = validation_set(cfg)
    assert np.mean([greedy_cover(g, best).size for g in val]) == best_mean
    assert best_mean <= report.initial_validation_mean
    if report.best_epoch:
        assert means[report.best_epoch - 1] == best_mean
        assert best_mean < min([report.initial_validation_mean] + means[:report.best_epoch - 1])
    _, again = train(cfg)
    assert again.history == report.history


def test_history_and_evaluation_csv(tmp_path):
    _, report = train(small_config(epochs=2))
    write_history_csv(report, tmp_path / "h.csv")
    lines = (tmp_path / "h.csv").read_text().splitlines()
    assert lines[0] == "epoch,pool_mode,validation_mean_cover,loss_mean,mse_vs_exact"
    assert len(lines) == 3
    assert read_history_csv(tmp_path / "h.csv") == report.history
    ev = evaluate(None, [complete_graph(3)], names=["k3"])
    write_evaluation_csv(ev, tmp_path / "e.csv")
    assert (tmp_path / "e.csv").read_text().splitlines() == [
        "graph_name,n,m,alg1,alg2,model,exact", "k3,3,3,2,2,,2"]
