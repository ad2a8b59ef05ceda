"""Sparse matrices over the field with two elements.

Storage is a canonical scipy CSR matrix with 0/1 entries.  Products are
computed in integer arithmetic and reduced mod 2; elimination routines
convert rows or columns to Python integers used as bitsets.
"""
from __future__ import annotations

import struct
from typing import Iterable, List, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

_MAGIC = b"F2M1"


def _canonical(m: sp.spmatrix) -> sp.csr_matrix:
    m = sp.csr_matrix(m, dtype=np.int64)
    m.sum_duplicates()
    m.data %= 2
    m.eliminate_zeros()
    m.sort_indices()
    return m


class F2Matrix:
    """Matrix over F2 with XOR addition and exact multiplication."""

    __slots__ = ("_csr",)

    def __init__(self, csr: sp.spmatrix):
        self._csr = _canonical(csr)

    # construction
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "F2Matrix":
        return cls(sp.csr_matrix((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(sp.identity(n, dtype=np.int64, format="csr"))

    @classmethod
    def from_entries(cls, rows: int, cols: int,
                     entries: Iterable[Tuple[int, int]]) -> "F2Matrix":
        """Build from (row, col) pairs; repeated pairs cancel in pairs."""
        entries = list(entries)
        if not entries:
            return cls.zeros(rows, cols)
        r, c = zip(*entries)
        data = np.ones(len(entries), dtype=np.int64)
        return cls(sp.coo_matrix((data, (r, c)), shape=(rows, cols)))

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Iterable[int]]) -> "F2Matrix":
        """Column j has ones exactly at the row indices ``columns[j]``."""
        entries = [(i, j) for j, col in enumerate(columns) for i in col]
        return cls.from_entries(rows, len(columns), entries)

    @classmethod
    def from_dense(cls, array) -> "F2Matrix":
        a = np.asarray(array, dtype=np.int64) % 2
        if a.ndim != 2:
            raise ValueError("dense input must be two-dimensional")
        return cls(sp.csr_matrix(a))

    # basic properties
    @property
    def shape(self) -> Tuple[int, int]:
        return self._csr.shape

    @property
    def nrows(self) -> int:
        return self._csr.shape[0]

    @property
    def ncols(self) -> int:
        return self._csr.shape[1]

    @property
    def nnz(self) -> int:
        return int(self._csr.nnz)

    def is_zero(self) -> bool:
        return self._csr.nnz == 0

    def entries(self) -> List[Tuple[int, int]]:
        """Nonzero positions sorted row-major."""
        coo = self._csr.tocoo()
        return sorted(zip(coo.row.tolist(), coo.col.tolist()))

    def row(self, i: int) -> List[int]:
        csr = self._csr
        return csr.indices[csr.indptr[i]:csr.indptr[i + 1]].tolist()

    def column(self, j: int) -> List[int]:
        col = self._csr[:, j].tocoo()
        return sorted(col.row.tolist())

    def columns(self) -> List[List[int]]:
        csc = self._csr.tocsc()
        csc.sort_indices()
        return [csc.indices[csc.indptr[j]:csc.indptr[j + 1]].tolist()
                for j in range(self.ncols)]

    def __getitem__(self, key: Tuple[int, int]) -> int:
        i, j = key
        return int(self._csr[i, j])

    # arithmetic
    def __add__(self, other: "F2Matrix") -> "F2Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return F2Matrix(self._csr + other._csr)

    __xor__ = __add__
    __sub__ = __add__

    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return F2Matrix(self._csr @ other._csr)

    def __eq__(self, other) -> bool:
        if not isinstance(other, F2Matrix):
            return NotImplemented
        return self.shape == other.shape and (self + other).is_zero()

    __hash__ = None

    @property
    def T(self) -> "F2Matrix":
        return F2Matrix(self._csr.T)

    def transpose(self) -> "F2Matrix":
        return self.T

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "F2Matrix":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if rows.size == 0 or cols.size == 0:
            return F2Matrix.zeros(rows.size, cols.size)
        return F2Matrix(self._csr[rows][:, cols])

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray().astype(np.uint8)

    def to_scipy(self) -> sp.csr_matrix:
        return self._csr.copy()

    def row_bits(self) -> List[int]:
        """Rows as integers, bit j set iff entry (i, j) is one."""
        csr = self._csr
        out = []
        for i in range(self.nrows):
            v = 0
            for j in csr.indices[csr.indptr[i]:csr.indptr[i + 1]]:
                v |= 1 << int(j)
            out.append(v)
        return out

    def column_bits(self) -> List[int]:
        return self.T.row_bits()

    # serialization
    def to_json(self) -> dict:
        return {"rows": self.nrows, "cols": self.ncols,
                "entries": [[i, j] for i, j in self.entries()]}

    @classmethod
    def from_json(cls, obj: dict) -> "F2Matrix":
        return cls.from_entries(int(obj["rows"]), int(obj["cols"]),
                                [(int(i), int(j)) for i, j in obj["entries"]])

    def to_bytes(self) -> bytes:
        """Dense bit-row layout.

        Header: ``b"F2M1"`` then rows and cols as little-endian uint32.
        Body: each row packed into ceil(cols / 8) bytes, entry (i, j) stored
        in bit ``j % 8`` (least significant first) of byte ``j // 8``.
        """
        dense = self.to_dense()
        width = (self.ncols + 7) // 8
        if self.nrows and width:
            body = np.packbits(dense, axis=1, bitorder="little").tobytes()
        else:
            body = b""
        return _MAGIC + struct.pack("<II", self.nrows, self.ncols) + body

    @classmethod
    def from_bytes(cls, blob: bytes) -> "F2Matrix":
        if blob[:4] != _MAGIC:
            raise ValueError("not a packed F2 matrix")
        rows, cols = struct.unpack("<II", blob[4:12])
        width = (cols + 7) // 8
        if rows == 0 or cols == 0:
            return cls.zeros(rows, cols)
        packed = np.frombuffer(blob[12:12 + rows * width], dtype=np.uint8)
        dense = np.unpackbits(packed.reshape(rows, width), axis=1,
                              bitorder="little")[:, :cols]
        return cls.from_dense(dense)

    def __repr__(self) -> str:
        return f"F2Matrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


def block_diag(blocks: Sequence[F2Matrix]) -> F2Matrix:
    if not blocks:
        return F2Matrix.zeros(0, 0)
    return F2Matrix(sp.block_diag([b.to_scipy() for b in blocks], format="csr"))
