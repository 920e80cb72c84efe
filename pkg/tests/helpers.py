"""Shared test utilities: brute-force oracles and random instance generators."""

from __future__ import annotations

from itertools import product as iter_product

import numpy as np

from spinsc.logic import GateKind, ScNetlist


def brute_force_probability(net: ScNetlist, output_id: str,
                            values: dict[str, float]) -> float:
    """Exact output probability by enumerating every terminal assignment.

    Independent oracle for expand_products: evaluates the gate DAG bitwise
    on all 2^N corner assignments and sums the corner weights where the
    output is 1.
    """
    terminals = net.terminals
    order = net.topo_order()
    total = 0.0
    for bits in iter_product((0, 1), repeat=len(terminals)):
        signal = dict(zip(terminals, bits))
        for gid in order:
            gate = net.gates[gid]
            ins = [signal[s] for s in gate.inputs]
            if gate.kind is GateKind.AND:
                signal[gid] = int(all(ins))
            elif gate.kind is GateKind.NOT:
                signal[gid] = 1 - ins[0]
            else:
                d0, d1, sel = ins
                signal[gid] = d1 if sel else d0
        if signal[output_id]:
            weight = 1.0
            for t, b in zip(terminals, bits):
                weight *= values[t] if b else 1.0 - values[t]
            total += weight
    return total


def random_netlist(rng: np.random.Generator, max_terminals: int = 50,
                   max_gates: int = 12) -> ScNetlist:
    """Random AND/NOT/MUX DAG with at least one output."""
    net = ScNetlist()
    n_terminals = int(rng.integers(2, max_terminals + 1))
    for i in range(n_terminals):
        net.add_terminal(f"T{i}")
    nodes = list(net.terminals)
    n_gates = int(rng.integers(1, max_gates + 1))
    for g in range(n_gates):
        kind = rng.choice(["AND", "AND", "AND", "NOT", "MUX"])
        if kind == "AND":
            k = int(rng.integers(2, 4))
            ins = [nodes[int(rng.integers(0, len(nodes)))] for _ in range(k)]
        elif kind == "NOT":
            ins = [nodes[int(rng.integers(0, len(nodes)))]]
        else:
            ins = [nodes[int(rng.integers(0, len(nodes)))] for _ in range(3)]
        gid = f"G{g}"
        net.add_gate(gid, GateKind(kind), ins)
        nodes.append(gid)
    sinks = [gid for gid in net.gates
             if not any(gid in g.inputs for g in net.gates.values())]
    for gid in sinks[: max(1, len(sinks))]:
        net.add_output(gid)
    return net


def random_assignment(rng: np.random.Generator, net: ScNetlist,
                      levels: list[float]) -> dict[str, float]:
    return {t: float(levels[int(rng.integers(0, len(levels)))])
            for t in net.terminals}
