"""Exact Dirichlet spectrum of ``sum_i (-d_i^2)^s`` on the open cube ``(0, L)^d``.

The eigenvalues are ``E_n = sum_i (n_i pi / L)^(2s)`` over multi-indices with
all ``n_i >= 1``.  Everything here reduces to lattice points of the positive
orthant inside a deformed ball, so the work is done by one vectorised kernel
that walks the lattice dimension by dimension with a shrinking energy budget.

Energies are reported in units where ``D_2s = 1``.
"""
from __future__ import annotations

import csv
import heapq
import io
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from ._report import BoundReport
from .errors import DomainError, ResourceLimitError
from .specfun import ball_volume, check_dimension, check_order

__all__ = [
    "SpectralParams",
    "EigenvalueRecord",
    "SpectrumSlice",
    "eigenvalue",
    "counting_function",
    "enumerate_below",
    "enumerate_smallest",
    "eigenvalue_sum",
    "lattice_sum",
    "iter_lattice_blocks",
    "scaled_eigenvalue_check",
    "brute_force_values",
    "brute_force_count",
    "tie_classes",
    "TIE_RTOL",
    "BOUNDARY_RTOL",
]

TIE_RTOL = 1e-9
BOUNDARY_RTOL = 1e-12
MAX_DIMENSION = 10
# Target number of lattice points materialised per block of the outer coordinate.
_BLOCK_POINTS = 2_000_000
CSV_VERSION = "fracspec-csv v1"


@dataclass(frozen=True)
class SpectralParams:
    """Cube side, dimension and order of the operator.

    ``include_zero`` admits index components equal to zero (all-zero excluded).
    That index set does not correspond to nonvanishing sine eigenfunctions and
    exists only for sensitivity studies.  ``inclusive`` sets which side of the
    energy cutoff a point within the boundary slack falls on.
    """

    d: int
    s: float
    L: float = 1.0
    D2s: float = 1.0
    strict: bool = False
    include_zero: bool = False
    inclusive: bool = True
    max_k: int = 10**7
    max_points: int = 5 * 10**7

    def __post_init__(self):
        d = check_dimension(self.d)
        if d > MAX_DIMENSION:
            raise DomainError(f"dimension must be <= {MAX_DIMENSION}, got {d}")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "s", check_order(self.s, self.strict))
        L = float(self.L)
        if not math.isfinite(L) or L <= 0:
            raise DomainError(f"side length L must be positive, got {self.L!r}")
        object.__setattr__(self, "L", L)
        D = float(self.D2s)
        if not math.isfinite(D) or D <= 0:
            raise DomainError(f"D2s must be positive, got {self.D2s!r}")
        object.__setattr__(self, "D2s", D)

    @property
    def volume(self) -> float:
        return self.L ** self.d

    @property
    def first_index(self) -> int:
        return 0 if self.include_zero else 1

    @property
    def level_unit(self) -> float:
        """Energy of the first one-dimensional mode, ``(pi/L)^(2s)``."""
        return (math.pi / self.L) ** (2.0 * self.s)

    @property
    def ground_energy(self) -> float:
        if self.include_zero:
            return self.level_unit
        return self.d * self.level_unit

    def levels(self, n) -> np.ndarray:
        """One-dimensional levels ``(n pi / L)^(2s)``."""
        x = np.asarray(n, dtype=float) * (math.pi / self.L)
        return np.power(x, 2.0 * self.s)

    def to_dimensionless(self, energy: float) -> float:
        return energy / self.D2s

    def threshold(self, E: float) -> float:
        slack = BOUNDARY_RTOL * max(1.0, abs(E))
        return E + slack if self.inclusive else E - slack

    def radius(self, E: float) -> float:
        """Lattice radius ``(L/pi) E^(1/2s)`` of the cutoff ``E``."""
        return self.L / math.pi * max(E, 0.0) ** (0.5 / self.s)

    def scaled(self, lam: float) -> "SpectralParams":
        return SpectralParams(self.d, self.s, self.L * lam, self.D2s, self.strict,
                              self.include_zero, self.inclusive, self.max_k, self.max_points)


@dataclass(frozen=True)
class EigenvalueRecord:
    value: float
    index: tuple
    multiplicity: int = 1
    level: int = 0

    def reconstruct(self, params: SpectralParams) -> float:
        return eigenvalue(params, self.index)


@dataclass(frozen=True, eq=False)
class SpectrumSlice:
    """A non-decreasing run of eigenvalues.

    Every eigenvalue ``<= cutoff`` of the underlying operator is present.
    ``cutoff_kind`` is ``"count"``, ``"energy"`` or ``"values"`` (an explicit
    finite spectrum, as used for toy checks, whose cutoff is infinite).
    """

    params: SpectralParams | None
    values: np.ndarray
    indices: np.ndarray | None
    classes: np.ndarray
    cutoff_kind: str
    cutoff: float
    _mult: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self._mult is None and len(self.classes):
            counts = np.bincount(self.classes)
            object.__setattr__(self, "_mult", counts[self.classes])

    @classmethod
    def from_values(cls, values, cutoff=math.inf) -> "SpectrumSlice":
        v = np.sort(np.asarray(values, dtype=float).ravel())
        if v.size and v[0] < 0:
            raise DomainError("eigenvalues must be non-negative")
        return cls(None, v, None, tie_classes(v), "values", float(cutoff))

    def __len__(self) -> int:
        return int(self.values.size)

    def __getitem__(self, i) -> EigenvalueRecord:
        idx = tuple(int(n) for n in self.indices[i]) if self.indices is not None else ()
        return EigenvalueRecord(float(self.values[i]), idx, int(self._mult[i]),
                                int(self.classes[i]))

    def __iter__(self) -> Iterator[EigenvalueRecord]:
        for i in range(len(self)):
            yield self[i]

    @property
    def records(self) -> list:
        return list(self)

    @property
    def last(self) -> EigenvalueRecord:
        return self[len(self) - 1]

    @property
    def multiplicities(self) -> np.ndarray:
        return self._mult

    def total(self) -> float:
        return math.fsum(self.values.tolist())

    def write_csv(self, fh) -> None:
        d = self.indices.shape[1] if self.indices is not None else 0
        fh.write(f"# {CSV_VERSION} spectrum\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"index_{i + 1}" for i in range(d)] + ["value", "multiplicity_class"])
        for i in range(len(self)):
            idx = [int(n) for n in self.indices[i]] if d else []
            w.writerow(idx + [repr(float(self.values[i])), int(self.classes[i])])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    def to_json(self) -> str:
        p = self.params
        doc = {
            "format": CSV_VERSION,
            "params": None if p is None else {"d": p.d, "s": p.s, "L": p.L, "D2s": p.D2s},
            "cutoff_kind": self.cutoff_kind,
            "cutoff": self.cutoff if math.isfinite(self.cutoff) else None,
            "records": [
                {"index": list(r.index), "value": r.value,
                 "multiplicity_class": r.level, "multiplicity": r.multiplicity}
                for r in self
            ],
        }
        return json.dumps(doc, indent=1)


# ---------------------------------------------------------------------------
# lattice kernel


def _level_table(params: SpectralParams, thr: float):
    """Indices and 1D levels that can appear below the threshold ``thr``."""
    if thr < 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    m = int(math.floor(params.radius(thr))) + 2
    n = np.arange(params.first_index, m + 1, dtype=np.int64)
    a = params.levels(n)
    keep = a <= thr
    return n[keep], a[keep]


def _exact_counts(acc, a, thr):
    """For each partial sum, how many levels ``a_j`` satisfy ``acc + a_j <= thr``.

    The search is done on ``thr - acc`` and then corrected against the exact
    floating-point sum, so the result agrees with summing in index order.
    """
    k = np.searchsorted(a, thr - acc, side="right")
    m = a.size
    for _ in range(4):
        km = np.clip(k - 1, 0, max(m - 1, 0))
        dec = (k > 0) & (acc + a[km] > thr)
        kp = np.clip(k, 0, max(m - 1, 0))
        inc = (k < m) & (acc + a[kp] <= thr)
        if not dec.any() and not inc.any():
            break
        k = k - dec + inc
    return k


def _expand(acc, a, counts):
    """Append one coordinate to every prefix, keeping lexicographic order."""
    total = int(counts.sum())
    parent = np.repeat(np.arange(acc.size), counts)
    offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    return acc[parent] + a[offs], parent, offs


def _prune_counts(acc, a, thr, reserve):
    # generous: a dropped prefix must have no completion at all
    pad = 1e-9 * max(1.0, abs(thr))
    return np.searchsorted(a, thr - reserve - acc + pad, side="right")


def _outer_blocks(params: SpectralParams, E: float):
    thr = params.threshold(E)
    n, a = _level_table(params, thr)
    if a.size == 0:
        return thr, n, a, []
    if params.d == 1:
        return thr, n, a, [(0, a.size)]
    amin = a[0]
    # outer coordinate values that leave room for the other d-1 coordinates
    m_outer = int(np.searchsorted(a, thr - (params.d - 1) * amin + 1e-9 * max(1.0, thr),
                                  side="right"))
    if m_outer == 0:
        return thr, n, a, []
    est = ball_volume(params.d, params.s) * (params.radius(thr) + 1.0) ** params.d / 2 ** params.d
    per_row = max(est / max(m_outer, 1), 1.0)
    width = int(min(max(_BLOCK_POINTS // per_row, 1), m_outer))
    blocks = [(lo, min(lo + width, m_outer)) for lo in range(0, m_outer, width)]
    return thr, n, a, blocks


def _block_points(params, thr, n, a, block, with_index):
    """Values (and optionally index columns) of all points with outer coordinate in ``block``."""
    lo, hi = block
    d = params.d
    acc = a[lo:hi].copy()
    cols = [np.arange(lo, hi)] if with_index else None
    amin = a[0]
    for j in range(1, d):
        remaining = d - 1 - j
        if j < d - 1:
            counts = _prune_counts(acc, a, thr, remaining * amin)
        else:
            counts = _exact_counts(acc, a, thr)
        acc, parent, offs = _expand(acc, a, counts)
        if with_index:
            cols = [c[parent] for c in cols] + [offs]
        if acc.size == 0:
            break
    if d == 1:
        keep = acc <= thr
        acc = acc[keep]
        if with_index:
            cols = [cols[0][keep]]
    idx = None
    if with_index:
        if acc.size == 0:
            idx = np.zeros((0, d), dtype=np.int64)
        else:
            idx = n[np.stack(cols, axis=1)]
    return acc, idx


def _block_count(params, thr, a, block) -> int:
    lo, hi = block
    d = params.d
    if d == 1:
        return int(np.count_nonzero(a[lo:hi] <= thr))
    acc = a[lo:hi].copy()
    amin = a[0]
    for j in range(1, d - 1):
        counts = _prune_counts(acc, a, thr, (d - 1 - j) * amin)
        acc, _, _ = _expand(acc, a, counts)
        if acc.size == 0:
            return 0
    return int(_exact_counts(acc, a, thr).sum())


def _run_blocks(fn, blocks, workers):
    if workers is None or workers <= 1 or len(blocks) <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, blocks))


def _origin_correction(params, thr) -> int:
    return 1 if params.include_zero and thr >= 0.0 else 0


def counting_function(params: SpectralParams, E: float, workers: int | None = None) -> int:
    """Exact ``N(E) = #{n : E_n <= E}``.

    The last coordinate is never enumerated: for each prefix of the first
    ``d - 1`` coordinates the admissible range is read off by bisection.
    """
    E = float(E)
    if math.isnan(E):
        raise DomainError("E must not be NaN")
    if math.isinf(E):
        if E < 0:
            return 0
        raise DomainError("E must be finite")
    thr, n, a, blocks = _outer_blocks(params, E)
    if not blocks:
        return 0
    parts = _run_blocks(lambda b: _block_count(params, thr, a, b), blocks, workers)
    return int(sum(parts)) - _origin_correction(params, thr)


def iter_lattice_blocks(params: SpectralParams, E: float, with_index: bool = False):
    """Yield ``(values, indices)`` blocks covering every point with ``E_n <= E``.

    Blocks come in lexicographic index order and their boundaries depend only
    on ``params`` and ``E``.
    """
    thr, n, a, blocks = _outer_blocks(params, float(E))
    for b in blocks:
        vals, idx = _block_points(params, thr, n, a, b, with_index)
        if params.include_zero and b[0] == 0:
            vals, idx = _drop_origin(vals, idx, with_index)
        yield vals, idx


def _drop_origin(vals, idx, with_index):
    # the origin is the first point of the first block when present
    if vals.size and vals[0] == 0.0:
        vals = vals[1:]
        if with_index:
            idx = idx[1:]
    return vals, idx


def lattice_sum(params: SpectralParams, E: float, func: Callable[[np.ndarray], np.ndarray],
                workers: int | None = None) -> float:
    """``sum func(E_n)`` over all ``E_n <= E`` with a block-ordered reduction.

    The result is bit-identical for any ``workers`` value.
    """
    thr, n, a, blocks = _outer_blocks(params, float(E))

    def one(b):
        vals, _ = _block_points(params, thr, n, a, b, False)
        if params.include_zero and b[0] == 0:
            vals, _ = _drop_origin(vals, None, False)
        if vals.size == 0:
            return 0.0
        return float(np.sum(func(vals)))

    return math.fsum(_run_blocks(one, blocks, workers))


def tie_classes(values: np.ndarray) -> np.ndarray:
    """Ordinal tie class (from 0) of each entry of a sorted array."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return np.zeros(0, dtype=np.int64)
    gap = np.diff(v) > TIE_RTOL * np.maximum(np.abs(v[1:]), 1e-300)
    return np.concatenate([[0], np.cumsum(gap)]).astype(np.int64)


def _ordered(values, indices):
    """Sort by value, then lexicographically within each tie class.

    Members of a class can differ in the last bits (the levels are summed in
    index order), so every member is reported at the class minimum; this
    keeps the output non-decreasing under the lexicographic tie order.
    """
    order = np.argsort(values, kind="stable")
    cls_sorted = tie_classes(values[order])
    if cls_sorted.size:
        starts = np.flatnonzero(np.diff(cls_sorted, prepend=-1))
        rep = values[order][starts]
    cls = np.empty_like(cls_sorted)
    cls[order] = cls_sorted
    keys = [indices[:, j] for j in range(indices.shape[1] - 1, -1, -1)] + [cls]
    final = np.lexsort(keys)
    cls = cls[final]
    out = rep[cls] if cls.size else values[final]
    return out, indices[final], cls


def _collect(params, E, with_index=True):
    est = ball_volume(params.d, params.s) * (params.radius(E) + 1.0) ** params.d / 2 ** params.d
    if est > params.max_points:
        raise ResourceLimitError(
            f"about {est:.3g} lattice points below E={E:g}; budget is {params.max_points}")
    vals, idxs = [], []
    for v, i in iter_lattice_blocks(params, E, with_index):
        vals.append(v)
        idxs.append(i)
    values = np.concatenate(vals) if vals else np.zeros(0)
    if not with_index:
        return values, None
    indices = np.concatenate(idxs) if idxs else np.zeros((0, params.d), dtype=np.int64)
    return values, indices


def enumerate_below(params: SpectralParams, E: float) -> SpectrumSlice:
    """All eigenvalues ``<= E`` (within the boundary slack), sorted."""
    E = float(E)
    values, indices = _collect(params, E)
    values, indices, cls = _ordered(values, indices)
    return SpectrumSlice(params, values, indices, cls, "energy", E)


def _finish_count_slice(params, values, indices, cls, k):
    values, indices, cls = values[:k], indices[:k], cls[:k]
    last = float(values[-1])
    cutoff = last if counting_function(params, last) == k else math.nextafter(last, 0.0)
    return SpectrumSlice(params, values, indices, cls, "count", cutoff)


def _weyl_inverse(params, k):
    # E with Weyl(E) = k; for n_i >= 1 this never exceeds the k-th eigenvalue
    c = ball_volume(params.d, params.s) * params.volume / (2 * math.pi) ** params.d
    return (k / c) ** (2.0 * params.s / params.d)


def enumerate_smallest(params: SpectralParams, k: int, method: str = "threshold") -> SpectrumSlice:
    """The ``k`` smallest eigenvalues with multiplicity.

    Ties (values within ``TIE_RTOL``) are ordered lexicographically by index.
    ``method="threshold"`` locates an energy with at least ``k`` points by
    counting and then materialises that ball; ``method="frontier"`` runs a
    best-first search over the lattice and is preferable for small ``k``.
    """
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    k = int(k)
    if k > params.max_k:
        raise ResourceLimitError(f"k={k} exceeds the configured maximum {params.max_k}")
    if method == "frontier":
        return _enumerate_frontier(params, k)
    if method != "threshold":
        raise DomainError(f"unknown method {method!r}")

    lo = 0.0 if params.include_zero else _weyl_inverse(params, k)
    hi = max(lo, params.ground_energy) * 1.5
    while counting_function(params, hi) < k:
        lo, hi = hi, hi * 2.0
    target = int(1.02 * k) + 16
    for _ in range(200):
        if counting_function(params, hi) <= target or hi - lo <= 1e-12 * hi:
            break
        mid = 0.5 * (lo + hi)
        if counting_function(params, mid) >= k:
            hi = mid
        else:
            lo = mid
    # widen so that the tie class straddling the k-th value is complete
    values, indices = _collect(params, hi * (1 + 10 * TIE_RTOL))
    values, indices, cls = _ordered(values, indices)
    return _finish_count_slice(params, values, indices, cls, k)


def _enumerate_frontier(params, k):
    d = params.d
    f = params.first_index
    lv = {}

    def level(i):
        v = lv.get(i)
        if v is None:
            v = lv[i] = float(params.levels(i))
        return v

    def value(idx):
        acc = level(idx[0])
        for i in idx[1:]:
            acc = acc + level(i)
        return acc

    start = (f,) * d
    heap = [(value(start), start)]
    seen = {start}
    out_v, out_i = [], []
    kth = None
    while heap:
        v, idx = heap[0]
        if kth is not None and v > kth + 10 * TIE_RTOL * max(kth, 1e-300):
            break
        heapq.heappop(heap)
        if not (params.include_zero and v == 0.0):
            out_v.append(v)
            out_i.append(idx)
            if len(out_v) == k:
                kth = v
        for j in range(d):
            nxt = idx[:j] + (idx[j] + 1,) + idx[j + 1:]
            if nxt not in seen:
                seen.add(nxt)
                heapq.heappush(heap, (value(nxt), nxt))
    values = np.array(out_v)
    indices = np.array(out_i, dtype=np.int64).reshape(-1, d)
    values, indices, cls = _ordered(values, indices)
    return _finish_count_slice(params, values, indices, cls, k)


def eigenvalue(params: SpectralParams, n: Sequence[int]) -> float:
    """``sum_i (n_i pi / L)^(2s)`` for one multi-index."""
    n = tuple(int(x) for x in np.atleast_1d(n))
    if len(n) != params.d:
        raise DomainError(f"index has {len(n)} components, expected {params.d}")
    if any(x < params.first_index for x in n) or not any(n):
        raise DomainError(f"index components must be >= {params.first_index}: {n}")
    a = params.levels(np.array(n))
    acc = float(a[0])
    for x in a[1:]:
        acc = acc + float(x)
    return acc


def eigenvalue_sum(params: SpectralParams, N: int) -> float:
    """``S(N)``, the sum of the ``N`` smallest eigenvalues."""
    return enumerate_smallest(params, N).total()


def scaled_eigenvalue_check(params: SpectralParams, lam: float, n, allow_boundary: bool = False):
    """Compare ``E_n`` on the cube of side ``L`` with ``lam^2s E_n`` on side ``lam L``."""
    lam = float(lam)
    ok = 0.0 < lam <= 1.0 if allow_boundary else 0.0 < lam < 1.0
    if not ok:
        raise DomainError(f"scale factor must lie in (0, 1), got {lam!r}")
    big = eigenvalue(params, n)
    small = eigenvalue(params.scaled(lam), n)
    return BoundReport.compare("scaling", big, lam ** (2 * params.s) * small, "eq",
                               param_point=f"lam={lam:g};n={tuple(n)}", rtol=1e-12)


# ---------------------------------------------------------------------------
# brute-force oracle


def brute_force_values(params: SpectralParams, E: float, limit: int = 2_000_000) -> np.ndarray:
    """Values of every lattice point in the full box ``n_i <= (L/pi) E^(1/2s) + 1`` below ``E``.

    Exhaustive over the box, no pruning; used to cross-check the kernel.
    """
    thr = params.threshold(float(E))
    if thr < 0:
        return np.zeros(0)
    m = int(math.floor(params.radius(thr))) + 1
    side = m - params.first_index + 1
    if side ** params.d > limit:
        raise ResourceLimitError(f"box of {side}^{params.d} points exceeds limit {limit}")
    n = np.arange(params.first_index, m + 1)
    a = params.levels(n)
    grids = np.indices((side,) * params.d).reshape(params.d, -1)
    acc = a[grids[0]]
    for j in range(1, params.d):
        acc = acc + a[grids[j]]
    keep = acc <= thr
    if params.include_zero:
        keep &= grids.any(axis=0)
    return np.sort(acc[keep])


def brute_force_count(params: SpectralParams, E: float, limit: int = 2_000_000) -> int:
    return int(brute_force_values(params, E, limit).size)


def brute_force_records(params: SpectralParams, E: float, limit: int = 200_000):
    """``(values, indices)`` of every point below ``E`` in canonical order.

    Plain Python sorting over the full box: by value, with runs of values
    closer than ``TIE_RTOL`` merged into one class ordered by index tuple and
    reported at the smallest value of the class.
    """
    thr = params.threshold(float(E))
    if thr < 0:
        return np.zeros(0), np.zeros((0, params.d), dtype=np.int64)
    m = int(math.floor(params.radius(thr))) + 1
    lo = params.first_index
    if (m - lo + 1) ** params.d > limit:
        raise ResourceLimitError(f"box of {(m - lo + 1) ** params.d} points exceeds limit {limit}")
    lev = {n: float(x) for n, x in zip(range(lo, m + 1), params.levels(np.arange(lo, m + 1)))}
    pts = []
    for idx in itertools.product(range(lo, m + 1), repeat=params.d):
        if params.include_zero and not any(idx):
            continue
        v = lev[idx[0]]
        for n in idx[1:]:
            v = v + lev[n]
        if v <= thr:
            pts.append((v, idx))
    pts.sort()
    out, group = [], []

    def flush():
        out.extend((group[0][0], idx) for _, idx in sorted(group, key=lambda r: r[1]))

    for v, idx in pts:
        if group and v - group[-1][0] > TIE_RTOL * max(abs(v), 1e-300):
            flush()
            group = []
        group.append((v, idx))
    if group:
        flush()
    values = np.array([r[0] for r in out], dtype=float)
    indices = np.array([r[1] for r in out], dtype=np.int64).reshape(-1, params.d)
    return values, indices
