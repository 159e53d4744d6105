import json
import math
import pathlib

import pytest

import ipplan

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="module")
def inst():
    return ipplan.grid_instance(3, 3, 0, 8, 6.0, pilot_count=8, seed=1)


def test_graph_basics():
    g = ipplan.grid_graph(2.0, 2.0, 1.0)
    assert len(g) == 9
    assert len(g.edges) == 12
    assert g.shortest_path_cost(0, 8) == pytest.approx(4.0)
    assert g.neighbors(4) == [1, 3, 5, 7]
    again = ipplan.load_graph(g.to_text())
    assert again.positions == g.positions


def test_invalid_grid_raises():
    with pytest.raises(ValueError):
        ipplan.grid_graph(0.0, 2.0, 1.0)


def test_solvers_agree_with_brute_force(inst):
    best = ipplan.brute_force(inst)
    assert best["valid"] and best["complete"]
    assert best["evaluations"] == ipplan.count_paths(inst)
    for r in (ipplan.greedy(inst), ipplan.recursive_greedy(inst), ipplan.genetic(inst, 20, 5, 1),
              ipplan.train(inst, episodes=100, hidden=8, seed=2)):
        assert r["valid"], r["solver"]
        assert inst.is_valid(r["path"])
        assert r["mi_total"] <= best["mi_total"] + 1e-9
        assert r["mi_total"] == pytest.approx(inst.reward(r["path"]))
        assert r["mi_gain_over_pilot"] == pytest.approx(r["mi_total"] - inst.start_reward)


def test_fit_on_custom_graph():
    g = ipplan.Graph([(0, 0), (1, 0), (1, 1)], [(0, 1, 1.0), (1, 2, 1.0)])
    locs = [(0.1 * i, 0.05 * i * i) for i in range(12)]
    vals = [math.sin(x) + y for x, y in locs]
    params, lml, degenerate = ipplan.fit_hyperparameters(locs, vals, ipplan.KernelParams(1.0, 1.0, 0.1))
    assert not degenerate
    assert lml >= ipplan.log_marginal_likelihood(ipplan.KernelParams(1.0, 1.0, 0.1), locs, vals)
    i = ipplan.Instance(g, params, locs, vals, 0, 2, 2.0)
    assert ipplan.brute_force(i)["path"] == [0, 1, 2]


def test_plan_from_config(tmp_path):
    cfg = json.loads((ROOT / "configs" / "grid4_tour.json").read_text())
    cfg["output"] = str(tmp_path)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    r = ipplan.plan(path, "greedy", 3)
    assert r["valid"] and r["seed"] == 3
    with pytest.raises(ValueError):
        ipplan.plan(path, "nope")
