from __future__ import annotations

import threading
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..elements import Component
from ..exceptions import ShapeMismatchException
from ..exceptions import UnsupportedException
from .matrix import FloatArray, Matrix, as_float_array

VJP = Callable[[FloatArray], Sequence[Optional[FloatArray]]]


class _Node:
    __slots__ = ("parents", "vjp", "name")

    def __init__(self, parents: Tuple[int, ...], vjp: Optional[VJP], name: Optional[str]) -> None:
        self.parents = parents
        self.vjp = vjp
        self.name = name

    @property
    def is_leaf(self) -> bool:
        return self.vjp is None


class Tape:
    """
    Ordered record of primitive operations. Nodes are appended as operations run,
    so every node's parents precede it and reverse order is a valid backward schedule.
    A Tape belongs to the thread that created it.
    """

    __slots__ = ("_nodes", "_owner")

    def __init__(self) -> None:
        self._nodes: List[_Node] = []
        self._owner = threading.get_ident()

    def __len__(self) -> int:
        return len(self._nodes)

    def __repr__(self) -> str:
        return f"Tape({len(self._nodes)} nodes)"

    def _vet_thread(self) -> None:
        if threading.get_ident() != self._owner:
            raise UnsupportedException(Component.Numerics, self, "A Tape is bound to the thread that created it")

    def leaf(self, value: Any, name: Optional[str] = None) -> Matrix:
        """Registers a differentiable input"""
        self._vet_thread()
        arr = value.numpy() if isinstance(value, Matrix) else as_float_array(value)
        checked = Matrix(arr)
        self._nodes.append(_Node((), None, name))
        return Matrix._wrap(checked.data, self, len(self._nodes) - 1)

    def record(self, value: FloatArray, parents: Sequence[Matrix], vjp: VJP) -> Matrix:
        self._vet_thread()
        idx: List[int] = []
        for p in parents:
            if p.tape is None:
                idx.append(-1)
            elif p.tape is not self:
                raise UnsupportedException(Component.Numerics, p, "Operands recorded on different tapes")
            else:
                idx.append(p.index)
        self._nodes.append(_Node(tuple(idx), vjp, None))
        return Matrix._wrap(value, self, len(self._nodes) - 1)

    def name_of(self, m: Matrix) -> Optional[str]:
        return self._nodes[m.index].name if m.tape is self else None

    def backward(self, output: Matrix) -> Gradients:
        return backward(self, output)


class Gradients:
    """Leaf gradients produced by a backward pass; leaves off every path report zeros"""

    __slots__ = ("_tape", "_grads")

    def __init__(self, tape: Tape, grads: Dict[int, FloatArray]) -> None:
        self._tape = tape
        self._grads = grads

    def __getitem__(self, leaf: Matrix) -> FloatArray:
        if leaf.tape is not self._tape:
            return np.zeros(leaf.shape, dtype=np.float64)
        g = self._grads.get(leaf.index)
        return np.zeros(leaf.shape, dtype=np.float64) if g is None else g

    def __contains__(self, leaf: Matrix) -> bool:
        return leaf.tape is self._tape and leaf.index in self._grads

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._grads))

    def __len__(self) -> int:
        return len(self._grads)


def backward(tape: Tape, output: Matrix) -> Gradients:
    """
    Reverse-mode sweep from a 1x1 output. Each node is visited once, in reverse
    recording order, and gradients from multiple paths accumulate by summation.
    """
    if output.shape != (1, 1):
        raise ShapeMismatchException(Component.Numerics, "backward", output.shape, (1, 1))
    if output.tape is None:
        return Gradients(tape, {})
    if output.tape is not tape:
        raise UnsupportedException(Component.Numerics, output, "Output was not recorded on this tape")
    tape._vet_thread()

    nodes = tape._nodes
    grads: List[Optional[FloatArray]] = [None] * (output.index + 1)
    grads[output.index] = np.ones((1, 1), dtype=np.float64)
    leaf_grads: Dict[int, FloatArray] = {}
    for i in range(output.index, -1, -1):
        g = grads[i]
        if g is None:
            continue
        node = nodes[i]
        if node.is_leaf:
            leaf_grads[i] = g
            continue
        assert node.vjp is not None
        for parent, pg in zip(node.parents, node.vjp(g)):
            if parent < 0 or pg is None:
                continue
            acc = grads[parent]
            grads[parent] = pg if acc is None else acc + pg
        grads[i] = None
    return Gradients(tape, leaf_grads)
