# One circuit, two compile modes.
#
# Global mode routes the laid-out circuit over the whole coupling map, so
# crossings between QPUs show up only as extra SWAPs. Distributed mode turns
# each crossing into an explicit remote event and prices it in the schedule.
import random

from modumap import compile_circuit, config_from_dict
from modumap.circuit import make_circuit

rng = random.Random(11)
ops = [("h", (q,)) for q in range(9)]
for _ in range(60):
    ops.append(("cx", tuple(rng.sample(range(9), 2))))
circuit = make_circuit(9, ops)

cfg = config_from_dict({
    "architecture": {"num_qpus": 3, "compute_per_qpu": 2, "comm_per_qpu": 1,
                     "local_topology": "line", "qpu_topology": "ring"},
    "partitioner": {"algorithm": "tpccap", "seed": 2},
})

for mode in ("global", "distributed"):
    rep = compile_circuit(circuit, cfg, mode)
    print(f"[{mode}]")
    print("  partition     ", rep.partition)
    print("  swaps         ", sum(rep.swap_counts), rep.swap_counts)
    print("  remote events ", rep.n_remote)
    print("  C_total       ", round(rep.costs["C_total"], 3))
    if rep.schedule is not None:
        s = rep.schedule
        print(f"  makespan       {s.makespan} over {s.num_layers} layers and {s.num_rounds} rounds")

# the first few remote events of the distributed program
rep = compile_circuit(circuit, cfg, "distributed")
for ev in rep.remote_events[:4]:
    print(ev["original_index"], ev["name"], ev["phys_operands"], "between QPUs", ev["endpoint_qpus"])
