import math
import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from modumap.architecture import ArchitectureConfig, build_architecture
from modumap.circuit import Circuit, make_circuit
from modumap.distributed import DistributedProgram, RemoteEvent, extract_distributed, route_locals
from modumap.errors import ParameterError, SchedulingError
from modumap.network import all_pairs_distances, build_qpu_graph
from modumap.scheduler import (CostParams, ScheduleReport, estimate_schedule, layerize, pack_rounds,
                               remote_cost, scalar_cost)

from helpers import random_circuit
from oracles import qpu_nx

CP = CostParams(tau_1=1, tau_2=2, tau_swap=6, tau_E=1, tau_C=2, tau_R=0.5, rho=0)


def ev(k, *qpus, ops=None):
    return RemoteEvent("cx", tuple(ops or qpus), tuple(qpus), original_index=k)


def program(locals_, events=(), bsz=2):
    return DistributedProgram(tuple(locals_), tuple(events), bsz)


def test_layerize_examples():
    assert len(layerize(program([make_circuit(2, [("h", (0,)), ("h", (1,))])]))) == 1
    assert len(layerize(program([make_circuit(2, [("h", (0,)), ("x", (0,))])]))) == 2
    two = program([Circuit(2), Circuit(2)], [ev(0, 0, 1, ops=(0, 2)), ev(1, 0, 1, ops=(0, 3))])
    assert len(layerize(two)) == 2


def test_remote_cost_examples():
    d = all_pairs_distances(build_qpu_graph("ring", 8))
    assert remote_cost(0, 1, d, CP) == 3.5
    assert remote_cost(0, 1, d, CostParams(tau_E=1, tau_C=2, tau_R=0.5, rho=1)) == 1.5
    assert remote_cost(0, 3, d, CostParams(tau_E=2, tau_C=0, tau_R=0, rho=0)) == 6
    lonely = build_qpu_graph("degree_bounded", 3, k=1)
    with pytest.raises(SchedulingError):
        remote_cost(0, 1, all_pairs_distances(lonely), CP)


def test_pack_rounds_examples():
    mesh = build_qpu_graph("mesh", 4)
    dm = all_pairs_distances(mesh)
    assert len(pack_rounds([ev(0, 0, 1), ev(1, 2, 3)], mesh, 1, CP, dm)) == 1
    assert len(pack_rounds([ev(0, 0, 1), ev(1, 0, 2)], mesh, 1, CP, dm)) == 2
    ring = build_qpu_graph("ring", 4)
    rounds = pack_rounds([ev(0, 0, 2), ev(1, 1, 3)], ring, 2, CP, all_pairs_distances(ring))
    assert len(rounds) == 2


def test_ring_collision_matches_path_enumeration():
    ring = build_qpu_graph("ring", 4)
    g = qpu_nx(ring)
    p02 = min(nx.all_shortest_paths(g, 0, 2))
    p13 = min(nx.all_shortest_paths(g, 1, 3))
    e02 = {frozenset(e) for e in zip(p02, p02[1:])}
    e13 = {frozenset(e) for e in zip(p13, p13[1:])}
    # 0-1-2 and 1-0-3 share link (0, 1)
    assert e02 & e13 == {frozenset((0, 1))}


def test_round_cost_is_max_and_switch_delay():
    ring = build_qpu_graph("ring", 6)
    d = all_pairs_distances(ring)
    (rnd,) = pack_rounds([ev(0, 0, 1), ev(1, 2, 4)], ring, 1, CP, d)
    assert rnd.cost == remote_cost(2, 4, d, CP) == 4.5
    sw = build_qpu_graph("switch", 4, switch_pair_limit=1, switch_reconfig_delay=0.25)
    rounds = pack_rounds([ev(0, 0, 1), ev(1, 2, 3), ev(2, 0, 2)], sw, 2, CP, all_pairs_distances(sw))
    assert len(rounds) == 3
    assert [r.cost for r in rounds] == [3.5, 3.75, 3.75]


def test_infeasible_events():
    mesh = build_qpu_graph("mesh", 2)
    with pytest.raises(SchedulingError):
        pack_rounds([ev(0, 0, 1)], mesh, 0, CP, all_pairs_distances(mesh))
    thin = build_qpu_graph("mesh", 2, link_capacity=0.5)
    with pytest.raises(SchedulingError):
        pack_rounds([ev(0, 0, 1)], thin, 1, CP, all_pairs_distances(thin))


def test_estimate_schedule_examples():
    a = build_architecture(ArchitectureConfig(2, 2, 1))
    qg, d = a.qpu_graph, all_pairs_distances(a.qpu_graph)
    empty = route_locals(extract_distributed(Circuit(6), a), a)
    assert estimate_schedule(empty, a, qg, d, CP) == ScheduleReport()
    local = extract_distributed(make_circuit(6, [("cx", (0, 1))]), a)
    rep = estimate_schedule(local, a, qg, d, CP)
    assert (rep.makespan, rep.num_layers, rep.num_rounds) == (2, 1, 0)
    remote = extract_distributed(make_circuit(6, [("cx", (2, 5))]), a)
    rep = estimate_schedule(remote, a, qg, d, CP)
    assert rep.makespan == 3.5 and rep.num_rounds == 1 and rep.peak_port_usage == 1
    assert rep.num_remote_ops == 1 and rep.peak_link_utilization == 1.0


def test_scalar_cost_examples():
    assert scalar_cost(2, 3, 1, 0, 0, CostParams(tau_1=1, tau_2=2, tau_swap=6))["C_local"] == 14
    assert scalar_cost(5, 5, 5, 0, 3, CP)["C_remote"] == 0
    assert scalar_cost(0, 0, 0, 0, 10, CostParams(tau_2=2))["C_total"] == 2.0
    assert scalar_cost(0, 0, 0, 2, 0, CP)["C_remote"] == 2 * (1 + 2 + 0.5)


@pytest.mark.parametrize("kw", [{"rho": 1.5}, {"tau_1": -1}, {"tau_E": math.inf}])
def test_cost_param_validation(kw):
    with pytest.raises(ParameterError):
        CostParams(**kw)


TOPOLOGIES = [{"kind": "mesh"}, {"kind": "ring"}, {"kind": "switch"},
              {"kind": "fat_tree", "levels": 2, "arity": 2}, {"kind": "clos", "m": 2}]


def random_program(rng, extra=()):
    n_q = rng.randint(2, 5)
    topo = rng.choice(TOPOLOGIES)
    if topo["kind"] == "switch":
        # composite events over all QPUs need N - 1 simultaneous pairs
        topo = {"kind": "switch", "switch_pair_limit": n_q - 1,
                "switch_reconfig_delay": rng.choice([0.0, 0.5])}
    a = build_architecture(ArchitectureConfig(n_q, rng.randint(1, 3), rng.randint(1, 3),
                                              rng.choice(["line", "clique"]), None, topo))
    m = random_circuit(rng, a.num_physical, rng.randint(0, 30), wide=True)
    if extra:
        m = Circuit(m.num_qubits, m.instructions + make_circuit(
            m.num_qubits, [("cx", extra)]).instructions)
    return a, route_locals(extract_distributed(m, a), a)


def replay_rounds(rounds, qg, ports):
    g = qpu_nx(qg)
    for rnd in rounds:
        port_use, link_use, pairs = {}, {}, set()
        for e in rnd.events:
            first = e.endpoint_qpus[0]
            for q in e.endpoint_qpus:
                port_use[q] = port_use.get(q, 0) + 1
            touched = set()
            for b in e.endpoint_qpus[1:]:
                path = min(nx.all_shortest_paths(g, first, b))
                touched |= {(min(u, v), max(u, v)) for u, v in zip(path, path[1:])}
                pairs.add((min(first, b), max(first, b)))
            for key in touched:
                link_use[key] = link_use.get(key, 0) + 1
        assert all(v <= ports for v in port_use.values())
        assert all(v <= qg.link_capacity[k] for k, v in link_use.items())
        if qg.switch_pair_limit is not None:
            assert len(pairs) <= qg.switch_pair_limit


@given(st.integers(0, 2**32 - 1))
def test_round_feasibility_by_replay(seed):
    rng = random.Random(seed)
    a, dp = random_program(rng)
    d = all_pairs_distances(a.qpu_graph)
    for layer in layerize(dp):
        replay_rounds(pack_rounds(layer.remotes, a.qpu_graph, a.num_ports, CP, d), a.qpu_graph,
                      a.num_ports)


@given(st.integers(0, 2**32 - 1))
def test_layer_validity(seed):
    rng = random.Random(seed)
    a, dp = random_program(rng)
    bsz = dp.block_size
    layers = layerize(dp)
    level_of = {}
    for k, layer in enumerate(layers):
        for q, insts in layer.locals.items():
            used = [x for i in insts for x in i.qubits]
            assert len(used) == len(set(used))
            for i in insts:
                level_of[("l", q, id(i))] = k
        for e in layer.remotes:
            level_of[("r", e.original_index)] = k
    for e in dp.remote_events:
        k = level_of[("r", e.original_index)]
        for q in e.endpoint_qpus:
            for i in dp.locals[q].instructions:
                if i.is_barrier or i.original_index >= e.original_index:
                    continue
                assert level_of[("l", q, id(i))] < k


@given(st.integers(0, 2**32 - 1))
def test_monotone_in_remote_events(seed):
    rng = random.Random(seed)
    state = rng.getstate()
    a, dp = random_program(rng)
    bsz = a.block_size
    rng.setstate(state)
    a2, dp2 = random_program(rng, extra=(0, bsz))
    d = all_pairs_distances(a.qpu_graph)
    r1 = estimate_schedule(dp, a, a.qpu_graph, d, CP)
    r2 = estimate_schedule(dp2, a2, a2.qpu_graph, d, CP)
    assert r2.num_remote_ops == r1.num_remote_ops + 1
    assert r2.num_rounds >= r1.num_rounds
    assert r2.makespan >= r1.makespan


@given(st.integers(0, 2**32 - 1), st.floats(0, 5))
def test_rho_bracket(seed, tau_c):
    rng = random.Random(seed)
    a, dp = random_program(rng)
    d = all_pairs_distances(a.qpu_graph)
    lo = estimate_schedule(dp, a, a.qpu_graph, d, CostParams(tau_C=tau_c, rho=1.0))
    hi = estimate_schedule(dp, a, a.qpu_graph, d, CostParams(tau_C=tau_c, rho=0.0))
    assert lo.makespan <= hi.makespan
    zero_lo = estimate_schedule(dp, a, a.qpu_graph, d, CostParams(tau_C=0, rho=1.0))
    zero_hi = estimate_schedule(dp, a, a.qpu_graph, d, CostParams(tau_C=0, rho=0.0))
    assert zero_lo.makespan == zero_hi.makespan
