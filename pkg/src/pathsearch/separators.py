"""Vertex separators: grid hyperplanes, tree centroids, an exact minimum
alpha-separator search, and the closed-form bounds they feed."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Iterable, Mapping, Sequence

from .graph import Graph, GridSpec, SizeGuardError

Box = tuple[tuple[int, int], ...]  # half-open [lo, hi) per axis

DEFAULT_EXACT_CAP = 20
GRID_EXACT_CAP = 25


class DegenerateRegionError(ValueError):
    pass


class NotATreeError(ValueError):
    pass


class OutOfScopeError(ValueError):
    pass


class SubhomogeneityError(ValueError):
    pass


@dataclass(frozen=True)
class SeparatorResult:
    cut: frozenset[int]
    parts: tuple[frozenset[int], ...]
    alpha_achieved: Fraction
    sentinel: bool = False

    @property
    def size(self) -> int:
        return len(self.cut)

    def to_json(self) -> dict:
        return {
            "cut": sorted(self.cut),
            "parts": [sorted(p) for p in self.parts],
            "alpha_achieved": str(self.alpha_achieved),
            "sentinel": self.sentinel,
        }


def as_fraction(alpha) -> Fraction:
    return alpha if isinstance(alpha, Fraction) else Fraction(str(alpha))


def separator_result(g: Graph, cut: Iterable[int], vertices: Iterable[int] | None = None,
                     reference: int | None = None, sentinel: bool = False) -> SeparatorResult:
    """Components of ``vertices - cut`` and the largest one's share of ``reference``."""
    pool = set(range(g.n)) if vertices is None else set(vertices)
    cut = frozenset(cut)
    parts = tuple(g.components(pool - cut))
    ref = reference if reference is not None else len(pool)
    biggest = max((len(p) for p in parts), default=0)
    return SeparatorResult(cut, parts, Fraction(biggest, ref) if ref else Fraction(0), sentinel)


# -- grid hyperplanes ---------------------------------------------------------------

def full_box(spec: GridSpec) -> Box:
    return tuple((0, r) for r in spec.dims)


def box_size(box: Box) -> int:
    return math.prod(hi - lo for lo, hi in box)


def box_vertices(spec: GridSpec, box: Box) -> list[int]:
    return [spec.index(c) for c in product(*(range(lo, hi) for lo, hi in box))]


def bounding_box(spec: GridSpec, vertices: Iterable[int]) -> Box:
    coords = [spec.coord(v) for v in vertices]
    return tuple((min(c[i] for c in coords), max(c[i] for c in coords) + 1) for i in range(spec.d))


def median_slice(box: Box, axis: int) -> int:
    """Lower median coordinate of the box along ``axis``."""
    lo, hi = box[axis]
    return lo + (hi - lo - 1) // 2


def hyperplane_separator(g: Graph, box: Box | None = None, axis: int = 0) -> SeparatorResult:
    """Cut a grid box by the slice orthogonal to ``axis`` at its lower median."""
    spec = g.grid
    if spec is None:
        raise ValueError("hyperplane cuts need a grid host")
    box = full_box(spec) if box is None else tuple(tuple(b) for b in box)
    lo, hi = box[axis]
    if hi - lo < 2:
        raise DegenerateRegionError(f"box side {hi - lo} along axis {axis} cannot be split")
    at = median_slice(box, axis)
    verts = box_vertices(spec, box)
    cut = [v for v in verts if spec.coord(v)[axis] == at]
    return separator_result(g, cut, verts)


# -- trees ---------------------------------------------------------------------------

def centroid(g: Graph, region: Iterable[int] | None = None) -> int:
    """A vertex whose removal leaves components of at most half the (sub)tree."""
    verts = sorted(set(range(g.n)) if region is None else set(region))
    inside = set(verts)
    root = verts[0]
    order, parent = [root], {root: -1}
    for u in order:
        for w in g.adj[u]:
            if w in inside and w not in parent:
                parent[w] = u
                order.append(w)
    if len(order) != len(verts):
        raise NotATreeError("region is not connected")
    size = {v: 1 for v in verts}
    for v in reversed(order[1:]):
        size[parent[v]] += size[v]
    n = len(verts)
    best, best_val = None, None
    for v in verts:
        worst = n - size[v]
        for w in g.adj[v]:
            if w in inside and parent.get(w) == v:
                worst = max(worst, size[w])
        if best_val is None or worst < best_val:
            best, best_val = v, worst
    return best


def centroid_separator(tree: Graph) -> SeparatorResult:
    if not tree.is_tree():
        raise NotATreeError(f"{tree.name or 'graph'} is not a tree")
    return separator_result(tree, [centroid(tree)])


# -- exact minimum alpha-separator ------------------------------------------------------

def _bit_components_ok(adj_mask: list[int], rest: int, limit: int) -> bool:
    """True iff ``rest`` splits into >= 2 components, each of size <= limit."""
    count = 0
    while rest:
        low = rest & -rest
        comp = frontier = low
        while frontier:
            nb = 0
            f = frontier
            while f:
                b = f & -f
                nb |= adj_mask[b.bit_length() - 1]
                f ^= b
            frontier = nb & rest & ~comp
            comp |= frontier
        if bin(comp).count("1") > limit:
            return False
        rest &= ~comp
        count += 1
    return count >= 2


def min_alpha_separator_exact(g: Graph, alpha, cap: int | None = None) -> SeparatorResult:
    """Smallest alpha-separator by iterative deepening over the cut size.

    Candidates of each size are scanned in lexicographic order, so the result
    is the lexicographically smallest minimum cut. Graphs with no separator
    (complete graphs, single vertices) get a sentinel cut of |V|-1 vertices.
    """
    alpha = as_fraction(alpha)
    n = g.n
    if cap is None:
        cap = GRID_EXACT_CAP if g.grid is not None else DEFAULT_EXACT_CAP
    if n > cap:
        raise SizeGuardError(f"{n} vertices exceeds the exact separator cap {cap}")
    limit = math.floor(alpha * n)
    adj_mask = [sum(1 << w for w in g.adj[v]) for v in range(n)]
    full = (1 << n) - 1
    for k in range(0, max(n - 1, 0)):
        for cut in combinations(range(n), k):
            cmask = 0
            for v in cut:
                cmask |= 1 << v
            if _bit_components_ok(adj_mask, full & ~cmask, limit):
                return separator_result(g, cut)
    return separator_result(g, range(max(n - 1, 0)), sentinel=True)


def s_alpha(g: Graph, alpha=Fraction(1, 2), cap: int | None = None) -> int:
    return min_alpha_separator_exact(g, alpha, cap).size


# -- bound formulas -------------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    name: str
    params: dict = field(default_factory=dict)
    value: Fraction | float = Fraction(0)

    def row(self) -> list[str]:
        params = ";".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return [self.name, params, str(self.value)]


def bounds_csv(reports: Sequence[BoundReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bound", "params", "value"])
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def _check_alpha(alpha: Fraction) -> None:
    if alpha < Fraction(1, 2) or alpha > 1:
        raise OutOfScopeError(f"alpha={alpha} outside [1/2, 1]")


def grid_separator_lower_bound(d: int, n: int, alpha) -> Fraction:
    """(1-alpha) n^(d-1) / d, valid for alpha >= 1/2."""
    alpha = as_fraction(alpha)
    _check_alpha(alpha)
    return (1 - alpha) * Fraction(n ** (d - 1), d)


def anisotropic_grid_bound(d: int, n: int, alpha) -> Fraction:
    """(1-alpha) n^(d-1) / (16 d) for the n/4 x n/4 x n x ... x n grid."""
    alpha = as_fraction(alpha)
    _check_alpha(alpha)
    if n % 4:
        raise ValueError(f"n={n} must be divisible by 4")
    return (1 - alpha) * Fraction(n ** (d - 1), 16 * d)


def anisotropic_dims(d: int, n: int) -> tuple[int, ...]:
    return (n // 4, n // 4) + (n,) * (d - 2)


def bisection_bound(d: int, n: int) -> Fraction:
    """Target bound (2 + 1/(2^d - 1)) n^(d-1) for hyperplane bisection.

    The alternating schedule actually spends up to ``bisection_cut_sum``,
    which is larger; the acceptance suite checks this target anyway.
    """
    return (2 + Fraction(1, 2 ** d - 1)) * n ** (d - 1)


def bisection_cut_sum(d: int, n: int) -> Fraction:
    """Sum of the cut sizes n^(d-1), n^(d-1)/2, ... of the alternating schedule.

    Within each cycle of d cuts the sizes halve d-1 times and then repeat, so
    the total is (2 + 1/(2^(d-1) - 1)) n^(d-1).
    """
    if d == 1:
        return Fraction(1)
    return (2 + Fraction(1, 2 ** (d - 1) - 1)) * n ** (d - 1)


def tree_bound(size: int) -> int:
    return math.ceil(math.log2(size)) if size > 1 else 0


def adversary_grid_bound(d: int, n: int) -> Fraction:
    """Weak adversary constant n^(d-1) / (3d) for G_d(n)."""
    return Fraction(n ** (d - 1), 3 * d)


def blowup_grid_bound(d: int, n: int) -> Fraction:
    """Setting-1 adversary constant n^(d-1) / (48 d), through the blow-up."""
    return Fraction(n ** (d - 1), 48 * d)


def subhom_query_bound(f: Callable[[float], float] | Mapping[int, float], size: int, alpha,
                       samples: Sequence[int] | None = None) -> Fraction | float:
    """f(size) / (1 - alpha) after checking f(a x) <= a f(x) on sample points.

    ``f`` may be a callable or a table of values at integer points; a table is
    checked on every pair of its keys.
    """
    alpha = as_fraction(alpha)
    if not 0 < alpha < 1:
        raise OutOfScopeError(f"alpha={alpha} must lie in (0, 1)")
    if isinstance(f, Mapping):
        table = dict(f)
        pts = sorted(table)
        for x in pts:
            for y in pts:
                if 0 < y <= x and table[y] > Fraction(y, x) * table[x] + 1e-12:
                    raise SubhomogeneityError(f"f({y}) > ({y}/{x}) f({x})")
        fx = table[size]
    else:
        pts = samples or sorted({1, 2, 3, 4, 5, 8, 10, 16, size // 2 or 1, size})
        ratios = [Fraction(k, 8) for k in range(1, 9)]
        for x in pts:
            for a in ratios:
                lhs, rhs = f(a * x), a * f(x)
                if float(lhs) > float(rhs) + 1e-9:
                    raise SubhomogeneityError(f"f({a}*{x}) = {lhs} > {rhs}")
        fx = f(size)
    if isinstance(fx, (int, Fraction)):
        return Fraction(fx) / (1 - alpha)
    return fx * float(1 / (1 - alpha))
