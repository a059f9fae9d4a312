"""DAG intermediate representation for ReLU networks.

A network is a tuple of nodes stored in one fixed topological order (a node's
predecessors are always earlier in the tuple, so positions double as ids).
Concrete and abstract evaluation walk the same order and perform the same
floating-point operations per node, which makes propagation of a point box
bit-identical to concrete evaluation.

Networks are immutable after construction and evaluation is pure, so instances
can be shared freely across threads. Builders and combinators always produce
new networks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .intervals import BoxRegion, Interval, iv_add, iv_affine_row, iv_relu

KINDS = ("input", "affine", "relu", "sum", "concat")


@dataclass(frozen=True, slots=True)
class Node:
    """One DAG node. ``preds`` are positions of earlier nodes in the network."""

    kind: str
    preds: tuple[int, ...] = ()
    index: int = -1  # input coordinate, for kind == "input"
    weights: tuple[tuple[float, ...], ...] = ()
    bias: tuple[float, ...] = ()


def input_node(index: int) -> Node:
    return Node("input", index=index)


def affine_node(pred: int, weights: Sequence[Sequence[float]], bias: Sequence[float]) -> Node:
    w = tuple(tuple(float(v) for v in row) for row in weights)
    return Node("affine", preds=(pred,), weights=w, bias=tuple(float(v) for v in bias))


def relu_node(pred: int) -> Node:
    return Node("relu", preds=(pred,))


def sum_node(preds: Sequence[int]) -> Node:
    return Node("sum", preds=tuple(preds))


def concat_node(preds: Sequence[int]) -> Node:
    return Node("concat", preds=tuple(preds))


@dataclass(frozen=True)
class Network:
    """A validated DAG with a designated output node and stored topological order."""

    nodes: tuple[Node, ...]
    output: int
    input_dim: int
    metadata: dict[str, str] = field(default_factory=dict)
    arities: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "arities", _validate(self.nodes, self.output, self.input_dim))

    @property
    def output_dim(self) -> int:
        return self.arities[self.output]

    def arity(self, node_id: int) -> int:
        return self.arities[node_id]


def _validate(nodes: tuple[Node, ...], output: int, input_dim: int) -> tuple[int, ...]:
    if not nodes:
        raise ValueError("network has no nodes")
    if not 0 <= output < len(nodes):
        raise ValueError(f"output node {output} is not defined")
    if input_dim < 1:
        raise ValueError("input_dim must be at least 1")
    arities: list[int] = []
    seen_inputs: dict[int, int] = {}
    for i, node in enumerate(nodes):
        for p in node.preds:
            if not 0 <= p < i:
                raise ValueError(f"node {i} must come after its predecessor {p}")
        if node.kind == "input":
            if not 0 <= node.index < input_dim:
                raise ValueError(f"node {i}: input index {node.index} out of range for dim {input_dim}")
            if node.index in seen_inputs:
                raise ValueError(f"node {i}: input index {node.index} already used by node {seen_inputs[node.index]}")
            seen_inputs[node.index] = i
            arities.append(1)
        elif node.kind == "affine":
            if len(node.preds) != 1:
                raise ValueError(f"node {i}: affine takes exactly one predecessor")
            rows = len(node.weights)
            if rows == 0 or len(node.bias) != rows:
                raise ValueError(f"node {i}: affine needs matching weight rows and bias entries")
            cols = arities[node.preds[0]]
            for row in node.weights:
                if len(row) != cols:
                    raise ValueError(f"node {i}: affine row width {len(row)} != predecessor arity {cols}")
            arities.append(rows)
        elif node.kind == "relu":
            if len(node.preds) != 1:
                raise ValueError(f"node {i}: relu takes exactly one predecessor")
            arities.append(arities[node.preds[0]])
        elif node.kind == "sum":
            if len(node.preds) < 2:
                raise ValueError(f"node {i}: sum needs at least two predecessors")
            widths = {arities[p] for p in node.preds}
            if len(widths) != 1:
                raise ValueError(f"node {i}: sum predecessors disagree on arity: {sorted(widths)}")
            arities.append(widths.pop())
        elif node.kind == "concat":
            if not node.preds:
                raise ValueError(f"node {i}: concat needs at least one predecessor")
            arities.append(sum(arities[p] for p in node.preds))
        else:
            raise ValueError(f"node {i}: unknown kind {node.kind!r}")
    if len(seen_inputs) != input_dim:
        missing = sorted(set(range(input_dim)) - set(seen_inputs))
        raise ValueError(f"missing input nodes for indices {missing}")
    return tuple(arities)


def eval_concrete(net: Network, x: Sequence[float]) -> tuple[float, ...]:
    """Evaluate the DAG at a point. Affine rows accumulate left to right, bias last."""
    if len(x) != net.input_dim:
        raise ValueError(f"expected {net.input_dim} inputs, got {len(x)}")
    vals: list[tuple[float, ...]] = []
    for node in net.nodes:
        if node.kind == "input":
            vals.append((float(x[node.index]),))
        elif node.kind == "affine":
            v = vals[node.preds[0]]
            out = []
            for row, b in zip(node.weights, node.bias):
                acc = 0.0
                for w, xv in zip(row, v):
                    acc += w * xv
                out.append(acc + b)
            vals.append(tuple(out))
        elif node.kind == "relu":
            vals.append(tuple(max(0.0, t) for t in vals[node.preds[0]]))
        elif node.kind == "sum":
            acc_v = list(vals[node.preds[0]])
            for p in node.preds[1:]:
                nxt = vals[p]
                for j in range(len(acc_v)):
                    acc_v[j] = acc_v[j] + nxt[j]
            vals.append(tuple(acc_v))
        else:  # concat
            parts: list[float] = []
            for p in node.preds:
                parts.extend(vals[p])
            vals.append(tuple(parts))
    return vals[net.output]


def eval_abstract(net: Network, box: BoxRegion) -> BoxRegion:
    """Propagate a box through the DAG with interval transformers, same node order."""
    if box.dim != net.input_dim:
        raise ValueError(f"expected a {net.input_dim}-d box, got {box.dim}-d")
    vals: list[tuple[Interval, ...]] = []
    for node in net.nodes:
        if node.kind == "input":
            vals.append((box.bounds[node.index],))
        elif node.kind == "affine":
            v = vals[node.preds[0]]
            vals.append(tuple(iv_affine_row(row, b, v) for row, b in zip(node.weights, node.bias)))
        elif node.kind == "relu":
            vals.append(tuple(iv_relu(t) for t in vals[node.preds[0]]))
        elif node.kind == "sum":
            acc = list(vals[node.preds[0]])
            for p in node.preds[1:]:
                nxt = vals[p]
                for j in range(len(acc)):
                    acc[j] = iv_add(acc[j], nxt[j])
            vals.append(tuple(acc))
        else:  # concat
            parts: list[Interval] = []
            for p in node.preds:
                parts.extend(vals[p])
            vals.append(tuple(parts))
    return BoxRegion(vals[net.output])


def stats(net: Network) -> dict[str, int]:
    """Flat counts: nodes, ReLU units, parameters, and longest path to the output."""
    relus = sum(net.arity(i) for i, n in enumerate(net.nodes) if n.kind == "relu")
    params = sum(
        len(n.weights) * len(n.weights[0]) + len(n.bias) for n in net.nodes if n.kind == "affine"
    )
    depth = [0] * len(net.nodes)
    for i, n in enumerate(net.nodes):
        if n.kind != "input":
            depth[i] = 1 + max((depth[p] for p in n.preds), default=0)
    return {
        "node_count": len(net.nodes),
        "relu_count": relus,
        "param_count": params,
        "depth": depth[net.output],
    }


def stats_document(net: Network) -> str:
    return "".join(f"{k} {v}\n" for k, v in stats(net).items())


class NetworkBuilder:
    """Appends nodes in topological order and assigns positions as ids."""

    def __init__(self, input_dim: int):
        self.input_dim = input_dim
        self._nodes: list[Node] = [input_node(i) for i in range(input_dim)]
        self._arities: list[int] = [1] * input_dim

    def input_id(self, index: int) -> int:
        return index

    @property
    def input_ids(self) -> list[int]:
        return list(range(self.input_dim))

    def arity(self, node_id: int) -> int:
        return self._arities[node_id]

    def _append(self, node: Node, arity: int) -> int:
        self._nodes.append(node)
        self._arities.append(arity)
        return len(self._nodes) - 1

    def affine(self, pred: int, weights: Sequence[Sequence[float]], bias: Sequence[float]) -> int:
        node = affine_node(pred, weights, bias)
        return self._append(node, len(node.weights))

    def relu(self, pred: int) -> int:
        return self._append(relu_node(pred), self._arities[pred])

    def sum(self, preds: Sequence[int]) -> int:
        widths = {self._arities[p] for p in preds}
        if len(widths) != 1:
            raise ValueError(f"sum predecessors disagree on arity: {sorted(widths)}")
        return self._append(sum_node(preds), self._arities[preds[0]])

    def concat(self, preds: Sequence[int]) -> int:
        return self._append(concat_node(preds), sum(self._arities[p] for p in preds))

    def select(self, pred: int, index: int) -> int:
        """Extract one channel of a vector node via a unit affine row."""
        row = [0.0] * self._arities[pred]
        row[index] = 1.0
        return self.affine(pred, [row], [0.0])

    def instantiate(self, net: Network, inputs: Sequence[int] | None = None) -> int:
        """Copy a network's nodes in, rewiring its input nodes onto existing ids."""
        if inputs is None:
            inputs = self.input_ids
        if len(inputs) != net.input_dim:
            raise ValueError(f"need {net.input_dim} input ids, got {len(inputs)}")
        remap: dict[int, int] = {}
        for i, node in enumerate(net.nodes):
            if node.kind == "input":
                remap[i] = inputs[node.index]
            else:
                moved = Node(
                    node.kind,
                    preds=tuple(remap[p] for p in node.preds),
                    index=node.index,
                    weights=node.weights,
                    bias=node.bias,
                )
                remap[i] = self._append(moved, _moved_arity(self, moved))
        return remap[net.output]

    def finish(self, output: int, metadata: dict[str, str] | None = None) -> Network:
        return Network(tuple(self._nodes), output, self.input_dim, dict(metadata or {}))


def _moved_arity(b: NetworkBuilder, node: Node) -> int:
    if node.kind == "affine":
        return len(node.weights)
    if node.kind in ("relu", "sum"):
        return b.arity(node.preds[0])
    return sum(b.arity(p) for p in node.preds)


def identity_network(dim: int) -> Network:
    b = NetworkBuilder(dim)
    src = b.concat(b.input_ids) if dim > 1 else b.input_id(0)
    rows = [[1.0 if j == i else 0.0 for j in range(dim)] for i in range(dim)]
    out = b.affine(src, rows, [0.0] * dim)
    return b.finish(out)


def compose(f: Network, g: Network) -> Network:
    """Network computing f(g(x))."""
    if g.output_dim != f.input_dim:
        raise ValueError(f"cannot compose: inner output dim {g.output_dim} != outer input dim {f.input_dim}")
    b = NetworkBuilder(g.input_dim)
    gid = b.instantiate(g)
    channels = [b.select(gid, i) for i in range(f.input_dim)]
    out = b.instantiate(f, channels)
    return b.finish(out)


def sum_outputs(nets: Sequence[Network], coefficients: Sequence[float], bias: float = 0.0) -> Network:
    """Network computing bias + sum_i c_i * nets_i(x), all nets sharing the input."""
    if len(nets) != len(coefficients):
        raise ValueError("need one coefficient per network")
    if not nets:
        raise ValueError("need at least one network")
    dim = nets[0].input_dim
    width = nets[0].output_dim
    for n in nets[1:]:
        if n.input_dim != dim or n.output_dim != width:
            raise ValueError("summed networks must agree on input and output dims")
    b = NetworkBuilder(dim)
    outs = [b.instantiate(n) for n in nets]
    cat = b.concat(outs)
    rows = []
    for r in range(width):
        row = [0.0] * (len(nets) * width)
        for i, c in enumerate(coefficients):
            row[i * width + r] = float(c)
        rows.append(row)
    out = b.affine(cat, rows, [float(bias)] * width)
    return b.finish(out)


def concat_outputs(nets: Sequence[Network]) -> Network:
    if not nets:
        raise ValueError("need at least one network")
    dim = nets[0].input_dim
    for n in nets[1:]:
        if n.input_dim != dim:
            raise ValueError("concatenated networks must share the input dimension")
    b = NetworkBuilder(dim)
    outs = [b.instantiate(n) for n in nets]
    out = b.concat(outs) if len(outs) > 1 else outs[0]
    return b.finish(out)


def affine_pre(net: Network, weights: Sequence[Sequence[float]], bias: Sequence[float]) -> Network:
    """Network computing net(W x + b)."""
    rows = len(weights)
    if rows != net.input_dim:
        raise ValueError(f"pre-affine must produce {net.input_dim} rows, got {rows}")
    cols = len(weights[0])
    b = NetworkBuilder(cols)
    src = b.concat(b.input_ids) if cols > 1 else b.input_id(0)
    aff = b.affine(src, weights, bias)
    channels = [b.select(aff, i) for i in range(rows)]
    out = b.instantiate(net, channels)
    return b.finish(out)


def affine_post(net: Network, weights: Sequence[Sequence[float]], bias: Sequence[float]) -> Network:
    """Network computing W net(x) + b."""
    if len(weights[0]) != net.output_dim:
        raise ValueError(f"post-affine expects {net.output_dim} columns, got {len(weights[0])}")
    b = NetworkBuilder(net.input_dim)
    out = b.instantiate(net)
    return b.finish(b.affine(out, weights, bias))


def constant_shift(net: Network, c: float) -> Network:
    """Network computing net(x) + c in every output component."""
    k = net.output_dim
    rows = [[1.0 if j == i else 0.0 for j in range(k)] for i in range(k)]
    return affine_post(net, rows, [float(c)] * k)
