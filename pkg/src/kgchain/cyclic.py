"""Cyclic-symmetry layer: shifts, realization, seed-level brackets, fields.

A seed f generates the cyclically symmetric function F = sum_{l} tau^l f.
All heavy computations stay at the seed level, where costs and norms do not
grow with the chain size; :func:`realize` expands the full polynomial and is
meant as a small-N ground truth.

Orientation convention, fixed project-wide: tau lowers site indices by one
(the monomial x_j becomes x_{j-1}), which matches the shift x_j -> x_{j+1}
on coordinate values.  Realization sums all N shifts, so either orientation
generates the same cyclic function; the choice is pinned by the
realization-based tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chainpoly import (
    BIRKHOFF,
    REAL,
    CoordinateError,
    ExpKey,
    Monomial,
    SeedPoly,
    left_align,
    poisson_bracket,
    poly_norm,
    sum_polys,
    _mono_arc_start,
    _mono_distance,
)

# realize() is intended as a test oracle; beyond this size it refuses.
REALIZE_CAP = 12


@dataclass(frozen=True)
class CyclicFn:
    """A cyclically symmetric function, stored through one of its seeds."""
    seed: SeedPoly
    n: int
    alignment: str = "left"


def cyclic_fn_to_dict(f: CyclicFn) -> dict:
    from .chainpoly import seed_to_dict
    d = seed_to_dict(f.seed)
    d["n"] = f.n
    d["alignment"] = f.alignment
    return d


def cyclic_fn_from_dict(d: dict) -> CyclicFn:
    from .chainpoly import seed_from_dict
    seed = seed_from_dict({k: d[k] for k in ("kind", "n", "terms")})
    return CyclicFn(seed, d["n"], d.get("alignment", "left"))


def cyclic_shift(f: SeedPoly, l: int) -> SeedPoly:
    """Apply tau^l: site indices decrease by l (mod N when bound)."""
    acc: dict[ExpKey, complex] = {}
    for k, c in f._terms.items():
        if f.n is None:
            kk = tuple((s - l, a, b) for s, a, b in k)
        else:
            kk = tuple(sorted(((s - l) % f.n, a, b) for s, a, b in k))
        acc[kk] = acc.get(kk, 0.0) + c
    return SeedPoly(f.kind, f.n, acc, _skip_clean=True)


def bind(f: SeedPoly, n: int) -> SeedPoly:
    """Bind a free seed to a chain of size n (site indices reduced mod n)."""
    if f.n == n:
        return f
    if f.n is not None:
        raise CoordinateError(f"seed already bound to n={f.n}")
    acc: dict[ExpKey, complex] = {}
    for k, c in f._terms.items():
        kk = Monomial((s % n, a, b) for s, a, b in k).exps
        acc[kk] = acc.get(kk, 0.0) + c
    return SeedPoly(f.kind, n, acc)


def realize(f: SeedPoly | CyclicFn, n: int | None = None,
            cap: int = REALIZE_CAP) -> SeedPoly:
    """Expand the full 2N-variable polynomial sum_{l=0..N-1} tau^l f.

    Ground truth for everything seed-level; capped because the cost and the
    output size grow with N.
    """
    if isinstance(f, CyclicFn):
        n = f.n
        f = f.seed
    if n is None:
        n = f.n
    if n is None:
        raise CoordinateError("realize needs a chain size")
    if n > cap:
        raise ValueError(f"realize cap exceeded: n={n} > {cap}")
    g = bind(f, n) if f.n is None else f
    return sum_polys(cyclic_shift(g, l) for l in range(n))


def seed_bracket(f: SeedPoly, g: SeedPoly, n: int | None = None,
                 prune_rel: float | None = None,
                 align: bool = True) -> SeedPoly:
    """A seed of {f^+, g^+}: the bracket {f, sum_l tau^l g}.

    Only shifts l whose support overlaps S(f) contribute, so the cost is
    independent of N for short-range seeds; the overlap set is computed
    with mod-N arithmetic, which keeps small-N wrap-around exact.
    """
    if f.kind != g.kind:
        raise CoordinateError("coordinate-kind mismatch")
    if n is None:
        n = f.n if f.n is not None else g.n
    if n is None:
        raise CoordinateError("seed_bracket needs a chain size")
    fb = bind(f, n) if f.n is None else f
    gb = bind(g, n) if g.n is None else g
    if fb.n != n or gb.n != n:
        raise CoordinateError("chain-size mismatch")

    out = _seed_bracket_accumulate(fb, gb, n, prune_rel)
    return left_align(out) if align else out


def _seed_bracket_accumulate(fb: SeedPoly, gb: SeedPoly, n: int,
                             prune_rel: float | None) -> SeedPoly:
    """Pair-driven sum over shifts: each term pair contributes only at the
    shifts that bring its supports into contact.

    Runs on bit-packed exponent words (see :mod:`kgchain.chainpoly`);
    packed shifted copies of the second factor's terms and the per-support
    shift sets are cached across pairs.
    """
    from .chainpoly import (
        _PACK_BITS,
        _PACK_MASK,
        _max_exponent,
        _pair_cut,
        _pack,
        _unpack,
    )

    fterms = sorted(fb._terms.items(), key=lambda kv: -abs(kv[1]))
    gterms = sorted(gb._terms.items(), key=lambda kv: -abs(kv[1]))
    if not fterms or not gterms:
        return SeedPoly.zero(fb.kind, n)
    if _max_exponent(fb) + _max_exponent(gb) >= _PACK_MASK:
        raise ValueError("exponent too large for the packed bracket")
    pair_cut = _pair_cut(fterms, gterms, prune_rel)

    slot_of = {s: s for s in range(n)}
    sites = list(range(n))
    double_mask = (_PACK_MASK << _PACK_BITS) | _PACK_MASK

    fp = []
    for k, c in fterms:
        ents = [(s, a, b, _PACK_BITS * 2 * s) for s, a, b in k]
        fp.append((_pack(k, slot_of), ents,
                   tuple(s for s, _, _ in k), c))
    gsupports = [tuple(s for s, _, _ in k) for k, _ in gterms]
    gshift_cache: list[dict[int, int]] = [{} for _ in gterms]
    shiftset_cache: dict[tuple, tuple] = {}

    acc: dict[int, complex] = {}
    gmax = abs(gterms[0][1])
    for kf, ents1, supp1, c1 in fp:
        if pair_cut and abs(c1) * gmax < pair_cut:
            break
        for gi, (k2, c2) in enumerate(gterms):
            cc = c1 * c2
            if pair_cut and abs(cc) < pair_cut:
                break
            supp2 = gsupports[gi]
            skey = (supp1, supp2)
            shifts = shiftset_cache.get(skey)
            if shifts is None:
                shifts = tuple({(s2 - s1) % n for s2 in supp2
                                for s1 in supp1})
                shiftset_cache[skey] = shifts
            cache = gshift_cache[gi]
            for l in shifts:
                kg = cache.get(l)
                if kg is None:
                    kg = _pack(tuple(((s - l) % n, a, b)
                                     for s, a, b in k2), slot_of)
                    cache[l] = kg
                for s, a1, b1, pos in ents1:
                    ab2 = (kg >> pos) & double_mask
                    if not ab2:
                        continue
                    a2 = ab2 & _PACK_MASK
                    b2 = ab2 >> _PACK_BITS
                    factor = a1 * b2 - b1 * a2
                    if factor:
                        k = kf + kg - (1 << pos) \
                            - (1 << (pos + _PACK_BITS))
                        acc[k] = acc.get(k, 0.0) + cc * factor
    out = SeedPoly(fb.kind, n, {_unpack(w, sites): v
                                for w, v in acc.items()})
    if prune_rel is not None:
        out = out.prune(prune_rel)
    return out


def symmetric_align(f: SeedPoly, n: int | None = None) -> SeedPoly:
    """Reseed so every monomial sits in a window centred on site 0.

    Site residues above N/2 are read as negative sites; a monomial whose
    covering arc misses site 0 is shifted so the arc ends there, and a
    monomial supported entirely on non-negative sites is mirrored to the
    non-positive side (the canonical representative).  The realization is
    unchanged; the per-monomial window half-width max |site| is the
    symmetric interaction distance, which is the sharper measure used for
    the centred decay decomposition.
    """
    if n is None:
        n = f.n
    if n is None:
        raise CoordinateError("symmetric_align needs a chain size")
    fb = bind(f, n) if f.n is None else f
    half = n // 2
    acc: dict[ExpKey, complex] = {}
    for k, c in fb._terms.items():
        start = _mono_arc_start(k, n)
        dist = _mono_distance(k, n)
        # Shift so the arc contains site 0 whenever it does not already.
        sites = [s for s, _, _ in k]
        arc = {(start + d) % n for d in range(dist + 1)}
        if 0 not in arc:
            shift = (start + dist) % n
            k = tuple(sorted(((s - shift) % n, a, b) for s, a, b in k))
            sites = [s for s, _, _ in k]
        centred = [s if s <= half else s - n for s in sites]
        if centred and min(centred) >= 0 and max(centred) > 0:
            # strictly right-sided: mirror so the far site lands on 0
            shift = max(centred)
            k = tuple(sorted(((s - shift) % n, a, b) for s, a, b in k))
        acc[k] = acc.get(k, 0.0) + c
    return SeedPoly(fb.kind, n, acc, _skip_clean=True)


def symmetric_distance(m: Monomial | ExpKey, n: int) -> int:
    """Window half-width max |site| with sites read as centred residues."""
    exps = m.exps if isinstance(m, Monomial) else m
    half = n // 2
    return max((s if s <= half else n - s for s, _, _ in exps), default=0)


def symmetric_parts(f: SeedPoly, n: int | None = None) -> dict[int, SeedPoly]:
    """Centred decay decomposition: parts indexed by window half-width."""
    g = symmetric_align(f, n)
    out: dict[int, dict[ExpKey, complex]] = {}
    for k, c in g._terms.items():
        m = symmetric_distance(k, g.n)
        part = out.setdefault(m, {})
        part[k] = part.get(k, 0.0) + c
    return {m: SeedPoly(g.kind, g.n, t, _skip_clean=True)
            for m, t in sorted(out.items())}


# -- Hamiltonian vector fields ---------------------------------------------

@dataclass(frozen=True)
class FieldSeed:
    """Seed pair of the Hamiltonian field of a cyclic function F = f^+.

    ``xq`` is dF/dy_0 (the first-block component at site 0) and ``xp`` is
    -dF/dx_0; the full field follows by shifts, components at site j being
    tau^{-j} applied to the site-0 pair.
    """
    xq: SeedPoly
    xp: SeedPoly
    n: int
    degree: int


def field_seed(f: SeedPoly, n: int | None = None) -> FieldSeed:
    if n is None:
        n = f.n
    if n is None:
        raise CoordinateError("field_seed needs a chain size")
    fb = bind(f, n) if f.n is None else f
    sites = {s for k in fb._terms for s, _, _ in k}
    xq = sum_polys((cyclic_shift(fb.partial(l, 1), l) for l in sites),
                   kind=fb.kind, n=n)
    xp = sum_polys((cyclic_shift(fb.partial(l, 0), l) for l in sites),
                   kind=fb.kind, n=n).scaled(-1.0)
    return FieldSeed(xq, xp, n, max(fb.max_degree() - 1, 0))


def field_norm(fs: FieldSeed, radius: float) -> float:
    """|||X_F|||_R = ||X_1||_R + ||X_{N+1}||_R."""
    return poly_norm(fs.xq, radius) + poly_norm(fs.xp, radius)


def field_norm_decay_bound(c_f: float, sigma: float, degree: int,
                           radius: float) -> float:
    """Bound 4 r R^{r-1} C_f / (1 - e^{-sigma})^2 for a degree-r function."""
    return 4 * degree * radius ** (degree - 1) * c_f \
        / (1.0 - math.exp(-sigma)) ** 2


# -- fast evaluation of realized functions and fields -----------------------

class RealizedEvaluator:
    """Evaluate F = f^+ at phase-space states, vectorised over shifts.

    States are arrays (..., 2N): first N entries the x/q block, last N the
    y/p block.  Cost O(N * terms) per state.
    """

    def __init__(self, f: SeedPoly, n: int | None = None):
        if f.kind != REAL:
            raise CoordinateError("evaluation needs a real-kind polynomial")
        if n is None:
            n = f.n
        if n is None:
            raise CoordinateError("evaluation needs a chain size")
        fb = bind(f, n) if f.n is None else f
        self.n = n
        terms = fb.terms()
        width = max((len(m.exps) for m, _ in terms), default=1)
        t = len(terms)
        self.coeff = np.zeros(t)
        self.sites = np.zeros((t, width), dtype=np.int64)
        self.aexp = np.zeros((t, width), dtype=np.int64)
        self.bexp = np.zeros((t, width), dtype=np.int64)
        for i, (m, c) in enumerate(terms):
            self.coeff[i] = c.real
            for j, (s, a, b) in enumerate(m.exps):
                self.sites[i, j] = s
                self.aexp[i, j] = a
                self.bexp[i, j] = b

    def shifted_values(self, state: np.ndarray) -> np.ndarray:
        """Values of (tau^l f)(z) for l = 0..N-1, shape (N,)."""
        n = self.n
        x, y = state[:n], state[n:]
        shifts = np.arange(n)
        idx = (self.sites[:, :, None] - shifts[None, None, :]) % n
        vals = (x[idx] ** self.aexp[:, :, None]
                * y[idx] ** self.bexp[:, :, None]).prod(axis=1)
        return self.coeff @ vals

    def __call__(self, state: np.ndarray) -> float:
        if self.coeff.size == 0:
            return 0.0
        return float(self.shifted_values(state).sum())

    def many(self, states: np.ndarray) -> np.ndarray:
        return np.array([self(s) for s in np.atleast_2d(states)])


class FieldEvaluator:
    """Evaluate the Hamiltonian field X_F at states via the field seeds."""

    def __init__(self, f: SeedPoly, n: int | None = None):
        fs = field_seed(f, n)
        self.n = fs.n
        self._eq = _ComponentEvaluator(fs.xq, fs.n)
        self._ep = _ComponentEvaluator(fs.xp, fs.n)

    def __call__(self, state: np.ndarray) -> np.ndarray:
        """Full field (dx/dt, dy/dt), shape (2N,)."""
        return np.concatenate([self._eq(state), self._ep(state)])


class _ComponentEvaluator:
    """Evaluates all shifts of one site-0 field component polynomial."""

    def __init__(self, p: SeedPoly, n: int):
        if p.kind != REAL:
            raise CoordinateError("evaluation needs a real-kind polynomial")
        self.n = n
        terms = p.terms()
        width = max((len(m.exps) for m, _ in terms), default=1)
        t = len(terms)
        self.coeff = np.zeros(t)
        self.sites = np.zeros((t, width), dtype=np.int64)
        self.aexp = np.zeros((t, width), dtype=np.int64)
        self.bexp = np.zeros((t, width), dtype=np.int64)
        for i, (m, c) in enumerate(terms):
            self.coeff[i] = c.real
            for j, (s, a, b) in enumerate(m.exps):
                self.sites[i, j] = s
                self.aexp[i, j] = a
                self.bexp[i, j] = b

    def __call__(self, state: np.ndarray) -> np.ndarray:
        n = self.n
        if self.coeff.size == 0:
            return np.zeros(n)
        x, y = state[:n], state[n:]
        # component at site j uses the seed's sites shifted by +j
        shifts = np.arange(n)
        idx = (self.sites[:, :, None] + shifts[None, None, :]) % n
        vals = (x[idx] ** self.aexp[:, :, None]
                * y[idx] ** self.bexp[:, :, None]).prod(axis=1)
        return self.coeff @ vals
