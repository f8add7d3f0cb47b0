"""Dense F2 matrices stored as one Python int per row.

Bit j of row i is the (i, j) entry. A matrix acts on column vectors, which are
ints over the column bits, so (M @ x)_i = <row_i, x> mod 2. Python ints give
arbitrary-width XOR rows for free; all inner loops are word-level operations.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple


def parity(x: int) -> int:
    return x.bit_count() & 1


class F2Matrix:
    __slots__ = ("rows", "cols", "data", "_rref")

    def __init__(self, rows: int, cols: int, data: Optional[Sequence[int]] = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative shape")
        self.rows = rows
        self.cols = cols
        if data is None:
            self.data: List[int] = [0] * rows
        else:
            if len(data) != rows:
                raise ValueError("row count does not match shape")
            mask = (1 << cols) - 1
            self.data = [r & mask for r in data]
        self._rref: Optional[Tuple[List[int], Tuple[int, ...]]] = None

    # construction helpers

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "F2Matrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable[Tuple[int, int]]) -> "F2Matrix":
        data = [0] * rows
        for i, j in entries:
            data[i] ^= 1 << j
        return cls(rows, cols, data)

    def entry(self, i: int, j: int) -> int:
        return (self.data[i] >> j) & 1

    def column(self, j: int) -> int:
        v = 0
        for i, row in enumerate(self.data):
            v |= ((row >> j) & 1) << i
        return v

    def is_zero(self) -> bool:
        return all(r == 0 for r in self.data)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, F2Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.data)))

    def __repr__(self):
        return f"F2Matrix({self.rows}x{self.cols})"

    # arithmetic

    def apply(self, x: int) -> int:
        y = 0
        for i, row in enumerate(self.data):
            y |= parity(row & x) << i
        return y

    def mul(self, other: "F2Matrix") -> "F2Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        out = []
        for row in self.data:
            acc = 0
            r = row
            while r:
                j = (r & -r).bit_length() - 1
                acc ^= other.data[j]
                r &= r - 1
            out.append(acc)
        return F2Matrix(self.rows, other.cols, out)

    def add(self, other: "F2Matrix") -> "F2Matrix":
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch in add")
        return F2Matrix(self.rows, self.cols, [a ^ b for a, b in zip(self.data, other.data)])

    def transpose(self) -> "F2Matrix":
        out = [0] * self.cols
        for i, row in enumerate(self.data):
            r = row
            while r:
                j = (r & -r).bit_length() - 1
                out[j] |= 1 << i
                r &= r - 1
        return F2Matrix(self.cols, self.rows, out)

    # reduction

    def rref(self) -> Tuple[List[int], Tuple[int, ...]]:
        """Row-reduce; returns (reduced rows, pivot column indices).

        Pivots are chosen lowest column first, topmost remaining row first,
        so the result is a deterministic function of the matrix.
        """
        if self._rref is not None:
            rows, piv = self._rref
            return list(rows), piv
        work = list(self.data)
        pivots: List[int] = []
        r = 0
        for c in range(self.cols):
            bit = 1 << c
            p = None
            for i in range(r, self.rows):
                if work[i] & bit:
                    p = i
                    break
            if p is None:
                continue
            work[r], work[p] = work[p], work[r]
            for i in range(self.rows):
                if i != r and (work[i] & bit):
                    work[i] ^= work[r]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        self._rref = (list(work), tuple(pivots))
        return list(work), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> List[int]:
        """Basis of {x : M x = 0}, one vector per free column, echelon order."""
        red, pivots = self.rref()
        piv_set = set(pivots)
        out = []
        for fc in range(self.cols):
            if fc in piv_set:
                continue
            v = 1 << fc
            for k, pc in enumerate(pivots):
                if red[k] & (1 << fc):
                    v |= 1 << pc
            out.append(v)
        return out

    def solve(self, y: int) -> Optional[int]:
        """A particular x with M x = y, or None. Free variables are set to 0."""
        aug = [row | (((y >> i) & 1) << self.cols) for i, row in enumerate(self.data)]
        red, pivots = F2Matrix(self.rows, self.cols + 1, aug).rref()
        if self.cols in pivots:
            return None
        x = 0
        for k, pc in enumerate(pivots):
            if (red[k] >> self.cols) & 1:
                x |= 1 << pc
        return x


def block_diag(blocks: Sequence[F2Matrix]) -> F2Matrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    data = []
    shift = 0
    for b in blocks:
        for row in b.data:
            data.append(row << shift)
        shift += b.cols
    return F2Matrix(rows, cols, data)


class EchelonSpace:
    """An F2 subspace kept in reduced echelon form (pivot = lowest set bit).

    add() returns True when the vector enlarged the space. coords() expresses
    a member in the current basis. The basis list is sorted by pivot, so all
    derived choices are deterministic.
    """

    __slots__ = ("basis",)

    def __init__(self, vectors: Iterable[int] = ()):
        self.basis: List[int] = []
        for v in vectors:
            self.add(v)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, v: int) -> int:
        for b in self.basis:
            if v & (b & -b):
                v ^= b
        return v

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if v == 0:
            return False
        pivot = v & -v
        for i, b in enumerate(self.basis):
            if b & pivot:
                self.basis[i] ^= v
        self.basis.append(v)
        self.basis.sort(key=lambda b: b & -b)
        return True

    def coords(self, v: int) -> Optional[int]:
        """Coefficients of v in self.basis (bit i = basis[i]), or None."""
        c = 0
        for i, b in enumerate(self.basis):
            if v & (b & -b):
                c |= 1 << i
                v ^= b
        return c if v == 0 else None

    def pivots(self) -> List[int]:
        return [(b & -b).bit_length() - 1 for b in self.basis]
