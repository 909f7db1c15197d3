"""Finite tracial algebras, filtrations and spectral calculus.

An operator is stored as a dense ``(n, n)`` complex array that is zero outside
the diagonal blocks of its algebra.  Spectral routines work block by block,
batching blocks of equal size through a single ``numpy.linalg.eigh`` call.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import config


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TracialAlgebra:
    """Direct sum of full matrix blocks with trace ``sum_b w_b Tr(x_b)``."""

    blocks: tuple = ((2, 1.0),)

    def __post_init__(self):
        blocks = tuple((int(d), float(w)) for d, w in self.blocks)
        if not blocks:
            raise AlgebraError("algebra needs at least one block")
        for d, w in blocks:
            if d < 1:
                raise AlgebraError(f"block dimension must be positive, got {d}")
            if not (w > 0 and np.isfinite(w)):
                raise AlgebraError(f"block weight must be positive and finite, got {w}")
        object.__setattr__(self, "blocks", blocks)

    def __eq__(self, other):
        return isinstance(other, TracialAlgebra) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    @property
    def total_dim(self):
        return sum(d for d, _ in self.blocks)

    @cached_property
    def offsets(self):
        return np.concatenate([[0], np.cumsum([d for d, _ in self.blocks])])

    @cached_property
    def coord_weights(self):
        """Trace weight of each coordinate."""
        return np.concatenate([np.full(d, w) for d, w in self.blocks])

    @cached_property
    def coord_block(self):
        return np.concatenate([np.full(d, i) for i, (d, _) in enumerate(self.blocks)])

    @cached_property
    def support_mask(self):
        b = self.coord_block
        return b[:, None] == b[None, :]

    @cached_property
    def _groups(self):
        # blocks grouped by size -> (d, index array of shape (m, d))
        out = {}
        for i, (d, _) in enumerate(self.blocks):
            out.setdefault(d, []).append(self.offsets[i])
        return [(d, np.asarray(offs)[:, None] + np.arange(d)) for d, offs in sorted(out.items())]

    @property
    def unit_trace(self):
        return float(sum(d * w for d, w in self.blocks))

    def identity(self):
        return np.eye(self.total_dim, dtype=complex)

    def zeros(self):
        return np.zeros((self.total_dim,) * 2, dtype=complex)

    def check(self, x):
        x = np.asarray(x)
        n = self.total_dim
        if x.shape != (n, n):
            raise AlgebraError(f"operator shape {x.shape} does not match algebra dimension {n}")
        off = np.abs(x[~self.support_mask])
        if off.size and off.max() > config.HERMITIAN_RTOL * max(1.0, np.abs(x).max()):
            raise AlgebraError("operator has entries outside the diagonal blocks")
        return np.asarray(x, dtype=complex)

    def trace(self, x):
        return complex(np.sum(self.coord_weights * np.diagonal(x)))

    def block(self, x, i):
        a, b = self.offsets[i], self.offsets[i + 1]
        return x[a:b, a:b]

    def from_blocks(self, mats):
        out = self.zeros()
        for i, m in enumerate(mats):
            a, b = self.offsets[i], self.offsets[i + 1]
            out[a:b, a:b] = m
        return out

    def opnorm(self, x):
        if x.size == 0:
            return 0.0
        return float(np.linalg.norm(x, 2))

    def eigh(self, x):
        """Blockwise eigendecomposition of a Hermitian operator.

        Returns ``(values, vectors)`` where ``values[j]`` is an eigenvalue living in
        the block of coordinate ``j`` (so it carries weight ``coord_weights[j]``) and
        ``vectors`` is block diagonal.
        """
        vals = np.empty(self.total_dim)
        vecs = np.zeros((self.total_dim,) * 2, dtype=complex)
        for d, idx in self._groups:
            sub = x[idx[:, :, None], idx[:, None, :]]
            if d == 1:
                vals[idx[:, 0]] = sub[:, 0, 0].real
                vecs[idx[:, 0], idx[:, 0]] = 1.0
                continue
            w, v = np.linalg.eigh(sub)
            vals[idx] = w
            vecs[idx[:, :, None], idx[:, None, :]] = v
        return vals, vecs

    def singular_values(self, x):
        """Singular values per coordinate slot (weights are ``coord_weights``)."""
        out = np.empty(self.total_dim)
        for d, idx in self._groups:
            sub = x[idx[:, :, None], idx[:, None, :]]
            if d == 1:
                out[idx[:, 0]] = np.abs(sub[:, 0, 0])
            else:
                out[idx] = np.linalg.svd(sub, compute_uv=False)
        return out

    def hermitian_part(self, x, check=True):
        x = np.asarray(x, dtype=complex)
        if check:
            scale = max(np.abs(x).max(initial=0.0), 1e-300)
            if np.abs(x - x.conj().T).max(initial=0.0) > config.HERMITIAN_RTOL * scale:
                raise AlgebraError("operator is not Hermitian")
        return (x + x.conj().T) / 2

    def calculus(self, x, f, check=True):
        """Apply ``f`` to the spectrum of a Hermitian ``x``."""
        h = self.hermitian_part(x, check)
        vals, vecs = self.eigh(h)
        with np.errstate(all="ignore"):
            fv = np.asarray(f(vals), dtype=float)
        if not np.all(np.isfinite(fv)):
            raise AlgebraError("function undefined on the spectrum")
        return (vecs * fv) @ vecs.conj().T

    def spectral_projection(self, x, a, b, check=True):
        """Projection onto the eigenvectors of ``x`` with eigenvalue in ``[a, b]``."""
        h = self.hermitian_part(x, check)
        vals, vecs = self.eigh(h)
        keep = (vals >= a) & (vals <= b)
        v = vecs[:, keep]
        return v @ v.conj().T

    def sqrt_positive(self, x):
        return self.calculus(x, lambda v: np.sqrt(np.clip(v, 0, None)), check=False)

    def abs(self, x):
        return self.sqrt_positive(x.conj().T @ x)

    def round_projection(self, p):
        """Nearest projection: snap the spectrum of ``(p+p*)/2`` to {0, 1}."""
        return self.spectral_projection(p, 0.5, np.inf, check=False)

    def min_eigenvalue(self, x):
        vals, _ = self.eigh(self.hermitian_part(x, check=False))
        return float(vals.min())

    def pnorm(self, x, p):
        s = self.singular_values(x)
        w = self.coord_weights
        if np.isinf(p):
            return float(s.max(initial=0.0))
        return float(np.sum(w * s ** p) ** (1.0 / p))


class Filtration:
    """Increasing chain ``M_1 ⊆ ... ⊆ M_N`` with trace preserving expectations.

    Three kinds are supported:

    ``pinching``
        ``partitions[n-1]`` partitions the coordinates; atoms coarsen with ``n``
        and never straddle two blocks.  ``E_n`` keeps entries whose row and column
        share an atom.
    ``tensor``
        single block algebra ``M_{d_1} ⊗ ... ⊗ M_{d_N}``; ``E_n`` is the normalized
        partial trace over the factors after ``n``.
    ``averaging``
        every block has dimension one (a weighted finite measure space);
        ``partitions[n-1]`` partitions the blocks and refines with ``n``; ``E_n``
        replaces values by weighted averages over atoms.  This is the classical
        commutative filtration.
    """

    KINDS = ("pinching", "tensor", "averaging")

    def __init__(self, algebra, kind, partitions=None, dims=None, allow_truncated=False):
        if kind not in self.KINDS:
            raise AlgebraError(f"unknown filtration kind {kind!r}")
        self.algebra = algebra
        self.kind = kind
        self.allow_truncated = bool(allow_truncated)
        n = algebra.total_dim
        if kind == "tensor":
            if dims is None or len(dims) < 2:
                raise AlgebraError("tensor filtration needs at least two factor dims")
            dims = tuple(int(d) for d in dims)
            if len(algebra.blocks) != 1:
                raise AlgebraError("tensor filtration needs a single block algebra")
            if any(d < 1 for d in dims):
                raise AlgebraError("factor dims must be positive")
            if int(np.prod(dims)) != n:
                raise AlgebraError(f"factor dims {dims} do not multiply to {n}")
            self.dims = dims
            self.partitions = None
            self.levels = len(dims)
        else:
            if partitions is None or len(partitions) < 2:
                raise AlgebraError(f"{kind} filtration needs at least two partitions")
            parts = tuple(tuple(tuple(int(i) for i in atom) for atom in p) for p in partitions)
            self.partitions = parts
            self.dims = None
            self.levels = len(parts)
            self._labels = [self._atom_labels(p, n) for p in parts]
            if kind == "pinching":
                self._validate_pinching()
            else:
                self._validate_averaging()
        self._cache = {}

    @staticmethod
    def _atom_labels(partition, n):
        lab = np.full(n, -1)
        for j, atom in enumerate(partition):
            for i in atom:
                if not 0 <= i < n or lab[i] != -1:
                    raise AlgebraError("partition atoms must be disjoint coordinates in range")
                lab[i] = j
        if (lab < 0).any():
            raise AlgebraError("partition does not cover every coordinate")
        return lab

    @staticmethod
    def _refines(fine, coarse):
        # every atom of `fine` sits inside one atom of `coarse`
        pairs = set(zip(fine.tolist(), coarse.tolist()))
        return len({a for a, _ in pairs}) == len(pairs)

    def _validate_pinching(self):
        blk = self.algebra.coord_block
        for lab in self._labels:
            if not self._refines(lab, blk):
                raise AlgebraError("pinching atoms must lie inside a single block")
        for n in range(self.levels - 1):
            if not self._refines(self._labels[n], self._labels[n + 1]):
                raise AlgebraError("pinching partitions must coarsen as the level grows")
        if not self.allow_truncated and not self._refines(blk, self._labels[-1]):
            raise AlgebraError("last pinching partition must be the block partition (E_N = id)")

    def _validate_averaging(self):
        if any(d != 1 for d, _ in self.algebra.blocks):
            raise AlgebraError("averaging filtration needs an algebra of one dimensional blocks")
        for n in range(self.levels - 1):
            if not self._refines(self._labels[n + 1], self._labels[n]):
                raise AlgebraError("averaging partitions must refine as the level grows")
        if not self.allow_truncated and len(set(self._labels[-1].tolist())) != self.algebra.total_dim:
            raise AlgebraError("last averaging partition must be singletons (E_N = id)")

    def _level(self, n):
        if n == 0:
            n = 1
        if not 1 <= n <= self.levels:
            raise AlgebraError(f"level {n} out of range 1..{self.levels}")
        return n

    def _operator(self, n):
        """Precomputed data for E_n."""
        if n in self._cache:
            return self._cache[n]
        if self.kind == "pinching":
            lab = self._labels[n - 1]
            data = lab[:, None] == lab[None, :]
        elif self.kind == "averaging":
            lab = self._labels[n - 1]
            w = self.algebra.coord_weights
            same = lab[:, None] == lab[None, :]
            data = same * w[None, :]
            data = data / data.sum(axis=1, keepdims=True)
        else:
            head = int(np.prod(self.dims[:n]))
            data = (head, self.algebra.total_dim // head)
        self._cache[n] = data
        return data

    def expectation(self, x, n):
        n = self._level(n)
        x = np.asarray(x)
        if x.shape != (self.algebra.total_dim,) * 2:
            raise AlgebraError("shape mismatch")
        if n == self.levels and not self.allow_truncated:
            return x.copy()
        data = self._operator(n)
        if self.kind == "pinching":
            return np.where(data, x, 0)
        if self.kind == "averaging":
            return np.diag(data @ np.diagonal(x))
        head, tail = data
        r = x.reshape(head, tail, head, tail)
        a = np.trace(r, axis1=1, axis2=3) / tail
        return np.kron(a, np.eye(tail))

    def in_level(self, x, n, tol=1e-10):
        e = self.expectation(x, n)
        return np.abs(e - x).max(initial=0.0) <= tol * max(1.0, np.abs(x).max(initial=0.0))

    def to_json(self):
        if self.kind == "tensor":
            out = {"kind": "tensor", "dims": list(self.dims)}
        else:
            out = {"kind": self.kind, "partitions": [[list(a) for a in p] for p in self.partitions]}
        if self.allow_truncated:
            out["allow_truncated"] = True
        return out

    @classmethod
    def from_json(cls, algebra, obj):
        kind = obj.get("kind")
        return cls(algebra, kind, partitions=obj.get("partitions"), dims=obj.get("dims"),
                   allow_truncated=obj.get("allow_truncated", False))


def chunk_partition(offsets, sizes, chunk):
    """Split each block (given by offsets and sizes) into contiguous atoms of ``chunk``."""
    atoms = []
    for off, size in zip(offsets, sizes):
        c = max(1, min(chunk, size))
        for start in range(0, size, c):
            atoms.append(tuple(range(off + start, off + min(size, start + c))))
    return tuple(atoms)


def dyadic_pinching(algebra, levels):
    """Pinching filtration whose atoms halve at each level down from whole blocks."""
    sizes = [d for d, _ in algebra.blocks]
    offs = algebra.offsets[:-1].tolist()
    parts = []
    for n in range(1, levels + 1):
        parts.append(tuple(a for s, o in zip(sizes, offs)
                           for a in chunk_partition([o], [s], max(1, s >> (levels - n)))))
    return Filtration(algebra, "pinching", partitions=parts)


def random_pinching(algebra, levels, rng):
    """Pinching filtration with random nested atoms.

    Going down from whole blocks, each atom of size at least two splits at a
    uniform random cut with probability 0.8.
    """
    atoms = [tuple(range(a, b)) for a, b in zip(algebra.offsets[:-1], algebra.offsets[1:])]
    parts = [tuple(atoms)]
    for _ in range(levels - 1):
        nxt = []
        for atom in atoms:
            if len(atom) >= 2 and rng.random() < 0.8:
                cut = int(rng.integers(1, len(atom)))
                nxt.extend([atom[:cut], atom[cut:]])
            else:
                nxt.append(atom)
        atoms = nxt
        parts.append(tuple(atoms))
    return Filtration(algebra, "pinching", partitions=parts[::-1])


def dyadic_averaging(algebra, levels):
    """Commutative dyadic filtration on an algebra of one dimensional blocks."""
    n = algebra.total_dim
    parts = []
    for lev in range(1, levels + 1):
        natoms = min(n, 2 ** max(0, int(np.ceil(np.log2(n))) - (levels - lev)))
        chunks = np.array_split(np.arange(n), natoms)
        parts.append(tuple(tuple(c.tolist()) for c in chunks if len(c)))
    return Filtration(algebra, "averaging", partitions=parts)


def tensor_filtration(algebra, levels):
    """Tensor filtration splitting a power of two dimension across ``levels`` factors."""
    n = algebra.total_dim
    k = int(round(np.log2(n)))
    if 2 ** k != n:
        raise AlgebraError("tensor_filtration helper needs a power of two dimension")
    dims = [1] * levels
    for i in range(k):
        dims[levels - 1 - (i % levels)] *= 2
    return Filtration(algebra, "tensor", dims=dims)
