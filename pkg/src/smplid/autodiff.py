"""Reverse-mode automatic differentiation over a flat scalar tape.

The forward pass records one node per scalar primitive into append-only arrays
(opcode, parent ids, inline constant).  Replaying the tape with new input
values re-evaluates every node and its local partial derivatives, so a tape
recorded once drives many optimisation steps; data-dependent branches must go
through the `where`/`gt` primitives (re-evaluated on replay), never Python
`if`, for the replay to stay faithful.

A backward sweep accumulates adjoints in reverse topological order, visiting
each node exactly once; memory and time are linear in the operation count.

The replay kernels are the package's hot loops.  They are compiled with numba
when available; setting SMPLID_NO_NUMBA=1 (or lacking numba) selects the pure
Python/numpy fallback, which computes identical values, only slower.  See
benchmarks/bench_tape.py for the comparison.
"""

from __future__ import annotations

import math
import os
from array import array

import numpy as np

from .errors import InvalidInputError

OP_INPUT = 0
OP_CONST = 1
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_DIV = 5
OP_NEG = 6
OP_SIN = 7
OP_COS = 8
OP_SQRT = 9
OP_ACOS = 10
OP_ATAN2 = 11
OP_ADDC = 12
OP_MULC = 13
OP_CSUB = 14
OP_CDIV = 15
OP_GT = 16
OP_GTC = 17
OP_WHERE = 18
OP_RELU = 19


def _forward_pass(op, p1, p2, p3, cst, val, pa, pb, pc):
    for k in range(op.shape[0]):
        o = op[k]
        if o == OP_INPUT or o == OP_CONST:
            continue
        i = p1[k]
        a = val[i]
        if o == OP_ADD:
            j = p2[k]
            val[k] = a + val[j]
            pa[k] = 1.0
            pb[k] = 1.0
        elif o == OP_MUL:
            j = p2[k]
            b = val[j]
            val[k] = a * b
            pa[k] = b
            pb[k] = a
        elif o == OP_MULC:
            c = cst[k]
            val[k] = a * c
            pa[k] = c
        elif o == OP_ADDC:
            val[k] = a + cst[k]
            pa[k] = 1.0
        elif o == OP_SUB:
            j = p2[k]
            val[k] = a - val[j]
            pa[k] = 1.0
            pb[k] = -1.0
        elif o == OP_WHERE:
            j = p2[k]
            m = p3[k]
            cond = a
            val[k] = val[j] if cond != 0.0 else val[m]
            pb[k] = cond
            pc[k] = 1.0 - cond
        elif o == OP_NEG:
            val[k] = -a
            pa[k] = -1.0
        elif o == OP_SIN:
            val[k] = math.sin(a)
            pa[k] = math.cos(a)
        elif o == OP_COS:
            val[k] = math.cos(a)
            pa[k] = -math.sin(a)
        elif o == OP_SQRT:
            s = math.sqrt(a)
            val[k] = s
            pa[k] = 0.5 / s
        elif o == OP_DIV:
            j = p2[k]
            b = val[j]
            inv = 1.0 / b
            val[k] = a * inv
            pa[k] = inv
            pb[k] = -a * inv * inv
        elif o == OP_ACOS:
            val[k] = math.acos(a)
            pa[k] = -1.0 / math.sqrt(1.0 - a * a)
        elif o == OP_ATAN2:
            j = p2[k]
            b = val[j]
            val[k] = math.atan2(a, b)
            d = a * a + b * b
            pa[k] = b / d
            pb[k] = -a / d
        elif o == OP_CSUB:
            val[k] = cst[k] - a
            pa[k] = -1.0
        elif o == OP_CDIV:
            c = cst[k]
            val[k] = c / a
            pa[k] = -c / (a * a)
        elif o == OP_GT:
            j = p2[k]
            val[k] = 1.0 if a > val[j] else 0.0
        elif o == OP_GTC:
            val[k] = 1.0 if a > cst[k] else 0.0
        elif o == OP_RELU:
            if a > 0.0:
                val[k] = a
                pa[k] = 1.0
            else:
                val[k] = 0.0
                pa[k] = 0.0


def _backward_pass(op, p1, p2, p3, pa, pb, pc, adj):
    for k in range(op.shape[0] - 1, -1, -1):
        g = adj[k]
        if g == 0.0:
            continue
        o = op[k]
        if o == OP_INPUT or o == OP_CONST:
            continue
        adj[p1[k]] += pa[k] * g
        if o == OP_ADD or o == OP_SUB or o == OP_MUL or o == OP_DIV or o == OP_ATAN2:
            adj[p2[k]] += pb[k] * g
        elif o == OP_WHERE:
            adj[p2[k]] += pb[k] * g
            adj[p3[k]] += pc[k] * g


def _compile_kernels():
    if os.environ.get("SMPLID_NO_NUMBA", "") not in ("", "0"):
        return _forward_pass, _backward_pass, "python"
    try:
        import numba
    except ImportError:
        return _forward_pass, _backward_pass, "python"
    fwd = numba.njit(cache=True)(_forward_pass)
    bwd = numba.njit(cache=True)(_backward_pass)
    return fwd, bwd, "numba"


_FORWARD, _BACKWARD, KERNEL_BACKEND = _compile_kernels()


class Tape:
    """Append-only record of scalar operations, replayable with new input values."""

    def __init__(self):
        self._op = array("B")
        self._p1 = array("q")
        self._p2 = array("q")
        self._p3 = array("q")
        self._cst = array("d")
        self._rec_val = array("d")
        self.n_inputs = 0
        self._frozen = None

    def __len__(self):
        return len(self._op)

    def input(self, value: float) -> "Dual":
        if self._frozen is not None:
            raise InvalidInputError("tape is finalized; no further recording")
        if len(self._op) != self.n_inputs:
            raise InvalidInputError("all inputs must be created before other operations")
        self.n_inputs += 1
        return Dual(self, self._emit(OP_INPUT, -1, -1, -1, 0.0, float(value)))

    def const(self, value: float) -> "Dual":
        return Dual(self, self._emit(OP_CONST, -1, -1, -1, float(value), float(value)))

    def _emit(self, op, p1, p2, p3, cst, value) -> int:
        self._op.append(op)
        self._p1.append(p1)
        self._p2.append(p2)
        self._p3.append(p3)
        self._cst.append(cst)
        self._rec_val.append(value)
        return len(self._op) - 1

    def finalize(self) -> None:
        """Freeze into numpy arrays and allocate replay buffers."""
        if self._frozen is not None:
            return
        n = len(self._op)
        self._frozen = {
            "op": np.frombuffer(self._op, dtype=np.uint8).copy(),
            "p1": np.frombuffer(self._p1, dtype=np.int64).copy(),
            "p2": np.frombuffer(self._p2, dtype=np.int64).copy(),
            "p3": np.frombuffer(self._p3, dtype=np.int64).copy(),
            "cst": np.frombuffer(self._cst, dtype=np.float64).copy(),
        }
        self.val = np.frombuffer(self._rec_val, dtype=np.float64).copy()
        self._pa = np.zeros(n)
        self._pb = np.zeros(n)
        self._pc = np.zeros(n)
        self._forward_done = False

    def forward(self, x: np.ndarray) -> None:
        """Replay the tape with new input values; node values land in self.val."""
        self.finalize()
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_inputs,):
            raise InvalidInputError(f"expected {self.n_inputs} input values, got shape {x.shape}")
        f = self._frozen
        self.val[: self.n_inputs] = x
        _FORWARD(f["op"], f["p1"], f["p2"], f["p3"], f["cst"], self.val, self._pa, self._pb, self._pc)
        self._forward_done = True

    def backward(self, out_id: int) -> np.ndarray:
        """Adjoint sweep from a scalar output node; returns d(out)/d(inputs)."""
        self.finalize()
        if not self._forward_done:
            # local partials for the recorded values
            self.forward(self.val[: self.n_inputs].copy())
        if not (0 <= out_id < len(self.val)):
            raise InvalidInputError("output id out of range")
        f = self._frozen
        adj = np.zeros(len(self.val))
        adj[out_id] = 1.0
        _BACKWARD(f["op"], f["p1"], f["p2"], f["p3"], self._pa, self._pb, self._pc, adj)
        return adj[: self.n_inputs].copy()


class Dual:
    """Scalar value bound to a tape node; arithmetic records onto the tape."""

    __slots__ = ("tape", "idx", "value")

    def __init__(self, tape: Tape, idx: int):
        self.tape = tape
        self.idx = idx
        self.value = tape._rec_val[idx]

    def _new(self, op, other_idx, p3, cst, value):
        return Dual(self.tape, self.tape._emit(op, self.idx, other_idx, p3, cst, value))

    def __add__(self, other):
        if isinstance(other, Dual):
            return self._new(OP_ADD, other.idx, -1, 0.0, self.value + other.value)
        return self._new(OP_ADDC, -1, -1, float(other), self.value + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return self._new(OP_SUB, other.idx, -1, 0.0, self.value - other.value)
        return self._new(OP_ADDC, -1, -1, -float(other), self.value - other)

    def __rsub__(self, other):
        return self._new(OP_CSUB, -1, -1, float(other), other - self.value)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return self._new(OP_MUL, other.idx, -1, 0.0, self.value * other.value)
        return self._new(OP_MULC, -1, -1, float(other), self.value * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            return self._new(OP_DIV, other.idx, -1, 0.0, self.value / other.value)
        return self._new(OP_MULC, -1, -1, 1.0 / float(other), self.value / other)

    def __rtruediv__(self, other):
        return self._new(OP_CDIV, -1, -1, float(other), other / self.value)

    def __neg__(self):
        return self._new(OP_NEG, -1, -1, 0.0, -self.value)


def _as_dual(tape: Tape, x) -> Dual:
    return x if isinstance(x, Dual) else tape.const(float(x))


def sin(x: Dual) -> Dual:
    return x._new(OP_SIN, -1, -1, 0.0, math.sin(x.value))


def cos(x: Dual) -> Dual:
    return x._new(OP_COS, -1, -1, 0.0, math.cos(x.value))


def sqrt(x: Dual) -> Dual:
    return x._new(OP_SQRT, -1, -1, 0.0, math.sqrt(x.value))


def acos(x: Dual) -> Dual:
    return x._new(OP_ACOS, -1, -1, 0.0, math.acos(x.value))


def atan2(y: Dual, x: Dual) -> Dual:
    return y._new(OP_ATAN2, x.idx, -1, 0.0, math.atan2(y.value, x.value))


def gt(a, b) -> Dual:
    """1.0 where a > b else 0.0; derivative zero (branch selector)."""
    if not isinstance(a, Dual):
        a = _as_dual(b.tape, a)
    if isinstance(b, Dual):
        return a._new(OP_GT, b.idx, -1, 0.0, 1.0 if a.value > b.value else 0.0)
    b = float(b)
    return a._new(OP_GTC, -1, -1, b, 1.0 if a.value > b else 0.0)


def where(cond: Dual, a, b) -> Dual:
    """Select a where cond is 1.0, else b; both branches are always evaluated."""
    tape = cond.tape
    a = _as_dual(tape, a)
    b = _as_dual(tape, b)
    value = a.value if cond.value != 0.0 else b.value
    return Dual(tape, tape._emit(OP_WHERE, cond.idx, a.idx, b.idx, 0.0, value))


def relu(x: Dual) -> Dual:
    """max(x, 0) with subgradient 0 at exactly 0."""
    return x._new(OP_RELU, -1, -1, 0.0, x.value if x.value > 0.0 else 0.0)


def clamp(x: Dual, lo: float, hi: float) -> Dual:
    """Clamp treated as constant outside [lo, hi] (zero derivative there)."""
    return where(gt(x, hi), x.tape.const(hi), where(gt(lo, x), x.tape.const(lo), x))


def norm3(x: Dual, y: Dual, z: Dual, floor: float = 1e-30) -> Dual:
    """Euclidean norm with a zero-guard: value 0 and subgradient 0 at the origin."""
    ss = x * x + y * y + z * z
    big = gt(ss, floor)
    return where(big, sqrt(where(big, ss, 1.0)), 0.0)


def record(fn, x0: np.ndarray):
    """Record fn over fresh inputs; returns (value, tape, output node id).

    fn receives a list of Dual inputs and must return a single Dual composed of
    the supported primitives.
    """
    tape = Tape()
    inputs = [tape.input(v) for v in np.asarray(x0, dtype=float)]
    out = fn(inputs)
    if not isinstance(out, Dual):
        raise InvalidInputError("recorded function must return a scalar Dual")
    tape.finalize()
    return out.value, tape, out.idx


def backward(tape: Tape, out_id: int) -> np.ndarray:
    """Gradient of the node `out_id` with respect to the tape inputs."""
    return tape.backward(out_id)


def gradient(tape: Tape, out_id: int, x: np.ndarray) -> tuple[float, np.ndarray]:
    """Replay with inputs x; returns (value, gradient)."""
    tape.forward(x)
    return float(tape.val[out_id]), tape.backward(out_id)
