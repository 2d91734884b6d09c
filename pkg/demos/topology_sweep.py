# How the interconnect shape changes the schedule for a fixed assignment.
import random

import numpy as np

from modumap import compile_circuit, config_from_dict
from modumap.circuit import make_circuit

rng = random.Random(0)
n_qpus, block = 8, 2
n = n_qpus * block
ops = [("cx", tuple(rng.sample(range(n), 2))) for _ in range(80)]
circuit = make_circuit(n, ops)
# pin qubit i to QPU i // block so only the network differs between runs
forced = [i // block for i in range(n)]

topologies = {
    "mesh": "mesh",
    "ring": "ring",
    "degree 3": {"kind": "degree_bounded", "k": 3},
    "fat tree": {"kind": "fat_tree", "levels": 2, "arity": 2},
    "clos": {"kind": "clos", "m": 2},
    # every layer here fits a single round, so the switch never pays its reconfiguration delay
    "switch": "switch",
}

print(f"{'topology':<10}{'makespan':>10}{'rounds':>8}{'peak link':>11}{'max load':>10}")
for name, topo in topologies.items():
    cfg = config_from_dict({
        "architecture": {"num_qpus": n_qpus, "compute_per_qpu": 1, "comm_per_qpu": 1,
                         "qpu_topology": topo, "switch_reconfig_delay": 0.5},
        "partitioner": {"forced_partition": forced},
    })
    rep = compile_circuit(circuit, cfg, "distributed")
    loads = np.array([x for _, _, x in rep.link_loads])
    s = rep.schedule
    print(f"{name:<10}{s.makespan:>10.1f}{s.num_rounds:>8}{s.peak_link_utilization:>11.2f}"
          f"{loads.max():>10.2f}")
