"""Topology- and port-aware compilation of quantum circuits for modular machines."""

from .architecture import ArchitectureConfig, ModularArchitecture, build_architecture, local_coupling, qpu_of
from .circuit import Circuit, Instruction, circuit_depth, gate_counts, make_circuit, parse_qasm, to_qasm
from .config import RunConfig, config_from_dict, load_config
from .distributed import DistributedProgram, RemoteEvent, extract_distributed, remote_count, route_locals
from .interaction import InteractionGraph, extract_weights
from .layout import apply_layout, assign_layout, validate_layout
from .network import (DistanceTable, LinkLoads, QpuGraph, TrafficMatrix, all_pairs_distances,
                      build_qpu_graph, route_ecmp, route_single_path, traffic_matrix,
                      validate_distance_table)
from .partition import (ObjectiveParams, ObjectiveTerms, SaParams, balanced_greedy_partition,
                        heavy_edge_partition, objective, run_partitioner, tpccap_partition,
                        tpccap_sa_partition)
from .pipeline import (CompilationReport, compile_circuit, compile_distributed, compile_global,
                       to_canonical_json)
from .routing import RoutedCircuit, route, verify_routed
from .scheduler import CostParams, ScheduleReport, estimate_schedule, pack_rounds, remote_cost, scalar_cost

__version__ = "0.1.0"
