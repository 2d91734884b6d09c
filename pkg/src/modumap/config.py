"""JSON run configuration: loading, validation and the materialized echo."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, fields, replace
from typing import Any, Mapping, Optional

from .architecture import LOCAL_TOPOLOGIES, ArchitectureConfig, ModularArchitecture, build_architecture
from .errors import ConfigError, ModumapError
from .layout import LAYOUT_MODES
from .network import ROUTING_MODES, TOPOLOGY_KINDS, QpuGraph, build_qpu_graph
from .partition import ALGORITHMS, DEFAULT_PASS_LIMIT, ObjectiveParams, SaParams
from .scheduler import CostParams

SEED_ENV = "MODUMAP_SEED"


@dataclass(frozen=True)
class ArchitectureBlock:
    num_qpus: int = 2
    compute_per_qpu: int = 4
    comm_per_qpu: int = 1
    local_topology: str = "line"
    grid_shape: Optional[tuple[int, int]] = None
    qpu_topology: str = "mesh"
    qpu_topology_params: Mapping[str, int] = field(default_factory=dict)
    link_capacity: float = 1.0
    # per-edge overrides as (a, b, capacity)
    link_capacities: tuple[tuple[int, int, float], ...] = ()
    switch_pair_limit: Optional[int] = None
    switch_reconfig_delay: float = 0.0


@dataclass(frozen=True)
class PartitionerBlock:
    algorithm: str = "tpccap"
    alpha: float = 1.0
    beta: float = 1.0
    eta: float = 0.5
    lam: float = 0.25
    routing_mode: str = "ecmp"
    seed: int = 0
    pass_limit: int = DEFAULT_PASS_LIMIT
    sa_initial_temp: Optional[float] = None
    sa_cooling: float = 0.995
    sa_steps: Optional[int] = None
    # bypasses the partitioner when set
    forced_partition: Optional[tuple[int, ...]] = None


@dataclass(frozen=True)
class LayoutBlock:
    mode: str = "top_k"


@dataclass(frozen=True)
class CostBlock:
    tau_1: float = 1.0
    tau_2: float = 2.0
    tau_swap: float = 6.0
    tau_E: float = 1.0
    tau_C: float = 2.0
    tau_R: float = 0.5
    rho: float = 0.0
    gamma: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    architecture: ArchitectureBlock = field(default_factory=ArchitectureBlock)
    partitioner: PartitionerBlock = field(default_factory=PartitionerBlock)
    layout: LayoutBlock = field(default_factory=LayoutBlock)
    cost: CostBlock = field(default_factory=CostBlock)

    def qpu_graph(self) -> QpuGraph:
        a = self.architecture
        g = build_qpu_graph(a.qpu_topology, a.num_qpus, a.link_capacity, a.switch_pair_limit,
                            a.switch_reconfig_delay, **dict(a.qpu_topology_params))
        if not a.link_capacities:
            return g
        caps = dict(g.link_capacity)
        for u, v, c in a.link_capacities:
            caps[(min(u, v), max(u, v))] = c
        return QpuGraph(g.num_qpus, g.edges, caps, g.topology_kind, g.num_vertices,
                        g.switch_pair_limit, g.switch_reconfig_delay, g.params)

    def build_architecture(self) -> ModularArchitecture:
        a = self.architecture
        cfg = ArchitectureConfig(a.num_qpus, a.compute_per_qpu, a.comm_per_qpu, a.local_topology,
                                 a.grid_shape, {"kind": a.qpu_topology})
        return build_architecture(cfg, self.qpu_graph())

    def objective_params(self) -> ObjectiveParams:
        p = self.partitioner
        return ObjectiveParams(p.alpha, p.beta, p.eta, p.routing_mode)

    def sa_params(self) -> SaParams:
        p = self.partitioner
        return SaParams(p.sa_initial_temp, p.sa_cooling, p.sa_steps, p.seed)

    def cost_params(self) -> CostParams:
        c = self.cost
        return CostParams(c.tau_1, c.tau_2, c.tau_swap, c.tau_E, c.tau_C, c.tau_R, c.rho)

    def to_dict(self) -> dict:
        a, p, c = self.architecture, self.partitioner, self.cost
        topo = {"kind": a.qpu_topology, **dict(sorted(a.qpu_topology_params.items()))}
        return {
            "architecture": {
                "num_qpus": a.num_qpus,
                "compute_per_qpu": a.compute_per_qpu,
                "comm_per_qpu": a.comm_per_qpu,
                "local_topology": a.local_topology,
                "grid_shape": list(a.grid_shape) if a.grid_shape else None,
                "qpu_topology": topo,
                "link_capacity": a.link_capacity,
                "link_capacities": [list(t) for t in a.link_capacities],
                "switch_pair_limit": a.switch_pair_limit,
                "switch_reconfig_delay": a.switch_reconfig_delay,
            },
            "partitioner": {
                "algorithm": p.algorithm,
                "alpha": p.alpha,
                "beta": p.beta,
                "eta": p.eta,
                "lambda": p.lam,
                "routing_mode": p.routing_mode,
                "seed": p.seed,
                "pass_limit": p.pass_limit,
                "sa": {"initial_temp": p.sa_initial_temp, "cooling": p.sa_cooling,
                       "steps": p.sa_steps},
                "forced_partition": list(p.forced_partition) if p.forced_partition is not None else None,
            },
            "layout": {"mode": self.layout.mode},
            "cost": {f.name: getattr(c, f.name) for f in fields(c)},
        }


# --------------------------------------------------------------------------
# loading


class _Reader:
    """Typed access to one JSON object with path-qualified errors."""

    def __init__(self, data: Any, path: str):
        if not isinstance(data, dict):
            raise ConfigError(path, f"expected an object, got {type(data).__name__}")
        self.data = dict(data)
        self.path = path
        self.used: set[str] = set()

    def sub(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def raw(self, key: str, default):
        self.used.add(key)
        return self.data.get(key, default)

    def integer(self, key, default, minimum=None, optional=False):
        v = self.raw(key, default)
        if v is None and optional:
            return None
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(self.sub(key), f"expected an integer, got {v!r}")
        if minimum is not None and v < minimum:
            raise ConfigError(self.sub(key), f"must be >= {minimum}, got {v}")
        return v

    def number(self, key, default, minimum=None, maximum=None, optional=False):
        v = self.raw(key, default)
        if v is None and optional:
            return None
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(self.sub(key), f"expected a finite number, got {v!r}")
        if minimum is not None and v < minimum:
            raise ConfigError(self.sub(key), f"must be >= {minimum}, got {v}")
        if maximum is not None and v > maximum:
            raise ConfigError(self.sub(key), f"must be <= {maximum}, got {v}")
        return float(v)

    def choice(self, key, default, options):
        v = self.raw(key, default)
        if v not in options:
            raise ConfigError(self.sub(key), f"expected one of {list(options)}, got {v!r}")
        return v

    def finish(self):
        extra = sorted(set(self.data) - self.used)
        if extra:
            raise ConfigError(self.sub(extra[0]), "unknown key")


def _int_list(v, path, length=None):
    if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in v):
        raise ConfigError(path, f"expected a list of integers, got {v!r}")
    if length is not None and len(v) != length:
        raise ConfigError(path, f"expected {length} entries, got {len(v)}")
    return tuple(v)


def _architecture(data) -> ArchitectureBlock:
    r = _Reader(data, "architecture")
    d = ArchitectureBlock()
    num_qpus = r.integer("num_qpus", d.num_qpus, 1)
    grid = r.raw("grid_shape", None)
    if grid is not None:
        grid = _int_list(grid, r.sub("grid_shape"), 2)
    topo = r.raw("qpu_topology", {"kind": d.qpu_topology})
    if isinstance(topo, str):
        topo = {"kind": topo}
    tr = _Reader(topo, r.sub("qpu_topology"))
    kind = tr.choice("kind", "mesh", TOPOLOGY_KINDS)
    tparams = {}
    for key in sorted(set(tr.data) - {"kind"}):
        tparams[key] = tr.integer(key, None)
    tr.finish()
    caps = []
    raw_caps = r.raw("link_capacities", [])
    if not isinstance(raw_caps, list):
        raise ConfigError(r.sub("link_capacities"), "expected a list of [a, b, capacity]")
    for k, item in enumerate(raw_caps):
        path = f"{r.sub('link_capacities')}[{k}]"
        if (not isinstance(item, list) or len(item) != 3
                or any(isinstance(x, bool) or not isinstance(x, int) for x in item[:2])
                or isinstance(item[2], bool) or not isinstance(item[2], (int, float))):
            raise ConfigError(path, f"expected [a, b, capacity], got {item!r}")
        caps.append((item[0], item[1], float(item[2])))
    block = ArchitectureBlock(
        num_qpus=num_qpus,
        compute_per_qpu=r.integer("compute_per_qpu", d.compute_per_qpu, 1),
        comm_per_qpu=r.integer("comm_per_qpu", d.comm_per_qpu, 0),
        local_topology=r.choice("local_topology", d.local_topology, LOCAL_TOPOLOGIES),
        grid_shape=grid,
        qpu_topology=kind,
        qpu_topology_params=tparams,
        link_capacity=r.number("link_capacity", d.link_capacity),
        link_capacities=tuple(caps),
        switch_pair_limit=r.integer("switch_pair_limit", None, 1, optional=True),
        switch_reconfig_delay=r.number("switch_reconfig_delay", d.switch_reconfig_delay, 0.0),
    )
    r.finish()
    return block


def _partitioner(data) -> PartitionerBlock:
    r = _Reader(data, "partitioner")
    d = PartitionerBlock()
    sa = _Reader(r.raw("sa", {}), r.sub("sa"))
    sa_block = dict(
        sa_initial_temp=sa.number("initial_temp", None, optional=True),
        sa_cooling=sa.number("cooling", d.sa_cooling),
        sa_steps=sa.integer("steps", None, 0, optional=True),
    )
    sa.finish()
    forced = r.raw("forced_partition", None)
    if forced is not None:
        forced = _int_list(forced, r.sub("forced_partition"))
    block = PartitionerBlock(
        algorithm=r.choice("algorithm", d.algorithm, ALGORITHMS),
        alpha=r.number("alpha", d.alpha, 0.0),
        beta=r.number("beta", d.beta, 0.0),
        eta=r.number("eta", d.eta, 0.0),
        lam=r.number("lambda", d.lam, 0.0),
        routing_mode=r.choice("routing_mode", d.routing_mode, ROUTING_MODES),
        seed=r.integer("seed", d.seed),
        pass_limit=r.integer("pass_limit", d.pass_limit, 0),
        forced_partition=forced,
        **sa_block,
    )
    r.finish()
    return block


def _layout(data) -> LayoutBlock:
    r = _Reader(data, "layout")
    block = LayoutBlock(mode=r.choice("mode", "top_k", LAYOUT_MODES))
    r.finish()
    return block


def _cost(data) -> CostBlock:
    r = _Reader(data, "cost")
    d = CostBlock()
    vals = {}
    for f in fields(CostBlock):
        if f.name == "rho":
            vals[f.name] = r.number(f.name, d.rho, 0.0, 1.0)
        elif f.name == "gamma":
            vals[f.name] = r.number(f.name, d.gamma, 0.0, 1.0)
            if vals[f.name] <= 0:
                raise ConfigError(r.sub("gamma"), "must lie in (0, 1]")
        else:
            vals[f.name] = r.number(f.name, getattr(d, f.name), 0.0)
    r.finish()
    return CostBlock(**vals)


def config_from_dict(data: Mapping[str, Any]) -> RunConfig:
    r = _Reader(data, "")
    cfg = RunConfig(
        architecture=_architecture(r.raw("architecture", {})),
        partitioner=_partitioner(r.raw("partitioner", {})),
        layout=_layout(r.raw("layout", {})),
        cost=_cost(r.raw("cost", {})),
    )
    r.finish()
    _cross_check(cfg)
    return cfg


def _cross_check(cfg: RunConfig) -> None:
    # surface module-level validation with the block it belongs to
    try:
        cfg.build_architecture()
    except ConfigError:
        raise
    except ModumapError as exc:
        raise ConfigError("architecture", str(exc)) from exc
    try:
        cfg.objective_params()
        cfg.sa_params()
    except ModumapError as exc:
        raise ConfigError("partitioner", str(exc)) from exc
    forced = cfg.partitioner.forced_partition
    if forced is not None:
        n = cfg.architecture.num_qpus
        for k, q in enumerate(forced):
            if not 0 <= q < n:
                raise ConfigError(f"partitioner.forced_partition[{k}]",
                                  f"QPU {q} out of range [0, {n})")


def apply_seed_override(cfg: RunConfig, env: Optional[Mapping[str, str]] = None) -> RunConfig:
    env = os.environ if env is None else env
    raw = env.get(SEED_ENV)
    if raw is None or raw == "":
        return cfg
    try:
        seed = int(raw)
    except ValueError:
        raise ConfigError(SEED_ENV, f"expected an integer, got {raw!r}") from None
    return replace(cfg, partitioner=replace(cfg.partitioner, seed=seed))


def load_config(path, env: Optional[Mapping[str, str]] = None) -> RunConfig:
    """Read a JSON config file. ``MODUMAP_SEED`` in ``env`` overrides the seed."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError("", f"config file not found: {path}") from None
    except OSError as exc:
        raise ConfigError("", f"cannot read config file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON in {path}: {exc}") from None
    return apply_seed_override(config_from_dict(data), env)
