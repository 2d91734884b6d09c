# Compare the four partitioners on one circuit and one interconnect.
# Run from the repository root: python3 demos/partitioner_tradeoffs.py
import random

from modumap import config_from_dict, parse_qasm
from modumap.pipeline import partition_stage

rng = random.Random(4)
n = 16
lines = ["OPENQASM 2.0;", f"qreg q[{n}];"]
# two loosely coupled halves plus a few long-range gates
for _ in range(120):
    half = rng.choice([range(0, 8), range(8, 16)])
    a, b = rng.sample(list(half), 2)
    lines.append(f"cx q[{a}],q[{b}];")
for _ in range(10):
    lines.append(f"cz q[{rng.randrange(8)}],q[{rng.randrange(8, 16)}];")
circuit = parse_qasm("\n".join(lines))

# one spare slot per QPU; with every block full, tpccap has no legal single move
base = {"architecture": {"num_qpus": 4, "compute_per_qpu": 4, "comm_per_qpu": 1,
                         "qpu_topology": "ring"}}

print(f"{'algorithm':<16}{'J':>10}{'cut*d':>10}{'ports':>8}{'cong':>8}  partition")
for alg in ["heavy_edge", "balanced_greedy", "tpccap", "tpccap_sa"]:
    cfg = config_from_dict({**base, "partitioner": {"algorithm": alg, "seed": 1}})
    _, _, pi, terms = partition_stage(circuit, cfg)
    print(f"{alg:<16}{terms.total:>10.2f}{terms.cut_distance_term:>10.2f}"
          f"{terms.port_term:>8.2f}{terms.congestion_term:>8.2f}  {pi}")

# eta scales the congestion term, so raising it spreads traffic over more links
for eta in (0.0, 0.5, 4.0):
    cfg = config_from_dict({**base, "partitioner": {"algorithm": "tpccap_sa", "eta": eta}})
    _, _, pi, terms = partition_stage(circuit, cfg)
    print(f"eta={eta:<4} cut*d={terms.cut_distance_term:.1f} congestion={terms.congestion_term:.1f}")
