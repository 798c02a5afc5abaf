"""Complete hyperbolic structures on cusped ideal triangulations.

Each ideal tetrahedron carries a shape ``z`` on its edges 01 and 23,
``z' = 1/(1-z)`` on 02 and 13 and ``z'' = 1 - 1/z`` on 03 and 12.  Gluing
equations are written in logarithmic form with integer exponent rows
``(A_t, B_t, C_t)`` per tetrahedron.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import os
import re

import numpy as np

from .perm import EDGES
from .triangulation import StructureError, Triangulation, parse_gluing_lines

# shape slot (0: z, 1: z', 2: z'') carried by each tetrahedron edge, in EDGES order
EDGE_SLOT = (0, 1, 2, 2, 1, 0)
REGULAR = complex(0.5, math.sqrt(3) / 2)
TOLERANCE = 1e-11
MAX_ITER = 100
MAX_HALVINGS = 20


class SolveError(RuntimeError):
    pass


@dataclass
class IdealTriangulation:
    tri: Triangulation
    edge_rows: np.ndarray        # (num edges, 3n) integer exponents
    cusp_rows: np.ndarray        # (num cusps, 3n)
    meridians: list              # per cusp, list of (tet, slot, sign)
    name: str = ""

    @property
    def n(self):
        return self.tri.n


@dataclass
class SolveResult:
    shapes: np.ndarray
    residual: float
    geometric: bool
    volume: float
    iterations: int


# -- fixtures -----------------------------------------------------------------------

_STEP = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")


def edge_equations(tri):
    """Exponent rows of the edge equations, one per edge class."""
    cls = tri.classes
    rows = np.zeros((len(cls.edges), 3 * tri.n), dtype=int)
    for ec in cls.edges:
        for t, e in ec.slots:
            rows[ec.id, 3 * t + EDGE_SLOT[e]] += 1
    return rows


def curve_row(n, steps):
    row = np.zeros(3 * n, dtype=int)
    for t, slot, sign in steps:
        if not (0 <= t < n and slot in (0, 1, 2) and sign in (1, -1)):
            raise StructureError(f"bad cusp curve step {(t, slot, sign)}")
        row[3 * t + slot] += sign
    return row


def build_ideal(tri, meridians, name=""):
    if not tri.is_closed:
        raise StructureError("ideal triangulation has an unglued face")
    cls = tri.classes
    if not cls.valid_edges or any(v.link_euler != 0 for v in cls.vertices):
        raise StructureError("every vertex link must be a torus")
    if len(meridians) != len(cls.vertices):
        raise StructureError("one meridian per cusp is required")
    rows = np.array([curve_row(tri.n, m) for m in meridians]).reshape(len(meridians), 3 * tri.n)
    return IdealTriangulation(tri, edge_equations(tri), rows, meridians, name)


def parse_ideal(text, name=""):
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != "ideal":
        raise StructureError("ideal fixture must start with 'ideal'")
    if len(lines) < 2 or not lines[1].startswith("tets"):
        raise StructureError("missing 'tets N' line")
    n = int(lines[1].split()[1])
    rows = parse_gluing_lines(lines[2:], n)
    tri = Triangulation(rows)
    meridians = {}
    for extra in lines[2 + n:]:
        m = re.match(r"meridian\s+(\d+)\s*:(.*)", extra)
        if not m:
            raise StructureError(f"unexpected line {extra!r}")
        steps = [tuple(int(x) for x in s) for s in _STEP.findall(m.group(2))]
        if not steps:
            raise StructureError("empty meridian")
        meridians[int(m.group(1))] = steps
    cusps = [meridians[c] for c in sorted(meridians)]
    if sorted(meridians) != list(range(len(cusps))):
        raise StructureError("meridians must be numbered 0..c-1")
    return build_ideal(tri, cusps, name)


def load_ideal(path):
    with open(path) as fh:
        name = os.path.splitext(os.path.basename(path))[0]
        return parse_ideal(fh.read(), name)


def format_ideal(it):
    lines = ["ideal", f"tets {it.n}"]
    for row in it.tri.gluings:
        lines.append(" ".join(f"{nb}:{''.join(map(str, p))}" for nb, p in row))
    for c, steps in enumerate(it.meridians):
        lines.append(f"meridian {c}: " + " ".join(f"({t},{s},{g})" for t, s, g in steps))
    return "\n".join(lines) + "\n"


# -- cusp curves ------------------------------------------------------------------

def _reduced(row):
    """Row in the coordinates (log z, log z'') after eliminating log z' = pi*i - ... ."""
    n = len(row) // 3
    out = []
    for t in range(n):
        a, b, c = row[3 * t:3 * t + 3]
        out.extend((a - b, c - b))
    return out


def _rank(rows):
    if not rows:
        return 0
    return np.linalg.matrix_rank(np.array(rows, dtype=float))


def cusp_curves(tri):
    """Closed curves on each vertex link, as lists of ``(tet, slot, sign)`` turns.

    Curves come from a spanning tree of the corner-triangle adjacency graph;
    each returned curve is homologically non-trivial on its torus (its row is
    independent of the edge equations).
    """
    cls = tri.classes
    edge_rows = [_reduced(r) for r in edge_equations(tri)]
    base_rank = _rank(edge_rows)
    out = []
    for v in cls.vertices:
        corners = list(v.corners)
        root = corners[0]
        parent = {root: None}
        order = [root]
        i = 0
        while i < len(order):
            t, c = order[i]
            i += 1
            for f in range(4):
                if f == c:
                    continue
                nb, p = tri.gluings[t][f]
                nxt = (nb, p[c])
                if nxt not in parent:
                    parent[nxt] = ((t, c), f)
                    order.append(nxt)
        tree_edges = {(k, parent[k][1]) for k in parent if parent[k] is not None}
        found = None
        for t, c in corners:
            for f in range(4):
                if f == c:
                    continue
                nb, p = tri.gluings[t][f]
                nxt = (nb, p[c])
                if ((nxt, p[f]) in tree_edges and parent[nxt][0] == (t, c)) or \
                        ((t, c), f) in tree_edges:
                    continue
                # cycle: root -> (t, c) -> cross f -> nxt -> root
                path = _tree_path(parent, (t, c))
                back = _tree_path(parent, nxt)
                # drop the shared prefix so the cycle never backtracks
                common = 0
                while common < min(len(path), len(back)) and path[common] == back[common]:
                    common += 1
                path, back = path[common:], back[common:]
                crossings = path + [((t, c), f)] + _reverse_path(tri, back)
                steps = _turns(tri, crossings)
                row = _reduced(curve_row(tri.n, steps))
                if _rank(edge_rows + [row]) > base_rank:
                    found = steps
                    break
            if found:
                break
        if found is None:
            raise StructureError("no non-trivial cusp curve found")
        out.append(found)
    return out


def _tree_path(parent, node):
    """Crossings ``((tet, corner), face)`` from the root down to ``node``."""
    path = []
    while parent[node] is not None:
        prev, f = parent[node]
        path.append((prev, f))
        node = prev
    return list(reversed(path))


def _reverse_path(tri, path):
    out = []
    for (t, c), f in reversed(path):
        nb, p = tri.gluings[t][f]
        out.append(((nb, p[c]), p[f]))
    return out


def _turns(tri, crossings):
    """Corner turns of a closed sequence of face crossings through cusp triangles."""
    from .perm import PARITY, EDGE_INDEX
    steps = []
    k = len(crossings)
    for i in range(k):
        (t, v), f_out = crossings[i]
        (tp, vp), f_prev = crossings[i - 1]
        nb, p = tri.gluings[tp][f_prev]
        assert (nb, p[vp]) == (t, v)
        f_in = p[f_prev]
        if f_in == f_out:
            continue
        (w,) = set(range(4)) - {v, f_in, f_out}
        sign = 1 if PARITY[(v, f_in, f_out, w)] == 0 else -1
        steps.append((t, EDGE_SLOT[EDGE_INDEX[v, w]], sign))
    return steps


# -- Newton's method -----------------------------------------------------------------

def _logs(z):
    lz = np.log(z)
    lzp = -np.log(1 - z)
    lzpp = np.log((z - 1) / z)
    return lz, lzp, lzpp


def _system(it):
    rows = np.vstack([it.edge_rows, it.cusp_rows])
    targets = np.concatenate([np.full(len(it.edge_rows), 2j * math.pi),
                              np.zeros(len(it.cusp_rows), dtype=complex)])
    return rows, targets


def _evaluate(rows, targets, z):
    lz, lzp, lzpp = _logs(z)
    logs = np.empty(3 * len(z), dtype=complex)
    logs[0::3], logs[1::3], logs[2::3] = lz, lzp, lzpp
    return rows @ logs - targets


def _jacobian(rows, z):
    d = np.empty(3 * len(z), dtype=complex)
    d[0::3] = 1 / z
    d[1::3] = 1 / (1 - z)
    d[2::3] = 1 / (z * (z - 1))
    full = rows * d[None, :]
    n = len(z)
    return full[:, 0::3] + full[:, 1::3] + full[:, 2::3] if n else full


def solve(it, initial=None, seed=0):
    """Newton iteration for the complete structure; retries once from a perturbed start."""
    n = it.n
    if initial is None:
        initial = np.full(n, REGULAR)
    else:
        initial = np.asarray(initial, dtype=complex)
        if initial.shape == ():
            initial = np.full(n, complex(initial))
    if np.any(initial.imag <= 0):
        raise ValueError("initial shapes must lie in the upper half plane")
    try:
        return _newton(it, initial)
    except SolveError:
        rng = np.random.default_rng(seed)
        start = initial + 0.1 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        start = start.real + 1j * np.abs(start.imag)
        return _newton(it, start)


def _newton(it, z):
    rows, targets = _system(it)
    z = z.copy()
    f = _evaluate(rows, targets, z)
    res = np.max(np.abs(f))
    for k in range(MAX_ITER):
        if res < TOLERANCE:
            return _result(it, z, res, k)
        jac = _jacobian(rows, z)
        step, *_ = np.linalg.lstsq(jac, -f, rcond=None)
        if not np.all(np.isfinite(step)):
            cond = np.linalg.cond(jac)
            raise SolveError(f"singular Jacobian (condition {cond:.3g})")
        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = z + lam * step
            if np.all(np.abs(trial) > 1e-14) and np.all(np.abs(1 - trial) > 1e-14):
                f_new = _evaluate(rows, targets, trial)
                res_new = np.max(np.abs(f_new))
                if res_new < res or res_new < TOLERANCE:
                    break
            lam /= 2
        else:
            raise SolveError("line search failed")
        z, f, res = trial, f_new, res_new
    if res < TOLERANCE:
        return _result(it, z, res, MAX_ITER)
    raise SolveError(f"no convergence after {MAX_ITER} iterations (residual {res:.3g})")


def _result(it, z, res, iterations):
    geometric = bool(np.all(z.imag > 0))
    vol = volume(z) if geometric else float("nan")
    return SolveResult(z, float(res), geometric, vol, iterations)


def angle_sums(it, shapes):
    """Imaginary parts of the edge-equation left-hand sides."""
    lz, lzp, lzpp = _logs(np.asarray(shapes, dtype=complex))
    logs = np.empty(3 * len(lz), dtype=complex)
    logs[0::3], logs[1::3], logs[2::3] = lz, lzp, lzpp
    return (it.edge_rows @ logs).imag


# -- dilogarithm, Bloch-Wigner and Lobachevsky ----------------------------------------

@lru_cache(maxsize=None)
def _bernoulli(count):
    """B_0 .. B_{count-1} as floats (B_1 = -1/2)."""
    b = [Fraction(0)] * count
    b[0] = Fraction(1)
    for m in range(1, count):
        b[m] = -sum(Fraction(math.comb(m + 1, k)) * b[k] for k in range(m)) / (m + 1)
    return tuple(float(x) for x in b)


_NB = 60


def _li2_bernoulli(z):
    """Li2(z) via the series in u = -log(1 - z); needs |u| well below 2*pi."""
    u = -cmath.log(1 - z)
    b = _bernoulli(_NB)
    total = 0j
    power = u
    fact = 1.0
    for k in range(_NB):
        fact *= (k + 1)
        term = b[k] * power / fact
        total += term
        power *= u
        if k > 4 and term != 0 and abs(term) < 1e-18 * max(1.0, abs(total)):
            break
    return total


def bloch_wigner(z):
    """D(z) = Im Li2(z) + arg(1 - z) log|z|."""
    z = complex(z)
    if z.imag == 0:
        return 0.0
    # move z by the symmetries of D to a point with |w| <= 1 and Re w <= 1/2
    images = (
        (z, 1), (1 / (1 - z), 1), (1 - 1 / z, 1),
        (1 / z, -1), (1 - z, -1), (z / (z - 1), -1),
    )
    best = None
    for w, s in images:
        if abs(w) <= 1 + 1e-12 and w.real <= 0.5 + 1e-12:
            key = abs(cmath.log(1 - w))
            if best is None or key < best[0]:
                best = (key, w, s)
    _, w, s = best
    li = _li2_bernoulli(w)
    return s * (li.imag + cmath.phase(1 - w) * math.log(abs(w)))


def volume(shapes):
    shapes = np.atleast_1d(np.asarray(shapes, dtype=complex))
    if np.any(shapes.imag == 0):
        raise ValueError("degenerate tetrahedron: shape on the real axis")
    return float(sum(bloch_wigner(z) for z in shapes))


def clausen2(theta):
    """Cl2(theta) = sum sin(k theta)/k^2, by a Bernoulli expansion near 0."""
    theta = math.remainder(theta, 2 * math.pi)
    if theta == 0:
        return 0.0
    b = _bernoulli(2 * 40 + 2)
    x = abs(theta)
    total = x - x * math.log(x)
    fact = 1.0
    for k in range(1, 41):
        # |B_2k| x^(2k+1) / (2k (2k+1)!)
        fact_2k1 = math.factorial(2 * k + 1)
        term = abs(b[2 * k]) * x ** (2 * k + 1) / (2 * k * fact_2k1)
        total += term
        if term < 1e-18:
            break
    return math.copysign(total, theta)


def lobachevsky(theta):
    """Lobachevsky function, half the Clausen function at twice the angle."""
    return 0.5 * clausen2(2 * theta)


# -- catalog ---------------------------------------------------------------------------

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "data", "ideal")


def volume_catalog(fixture_dir=FIXTURE_DIR):
    """Solve every ``*.tri`` ideal fixture in a directory; failures are reported, not raised."""
    rows = []
    for fname in sorted(os.listdir(fixture_dir)):
        if not fname.endswith(".tri"):
            continue
        path = os.path.join(fixture_dir, fname)
        name = os.path.splitext(fname)[0]
        try:
            res = solve(load_ideal(path))
            rows.append({"name": name, "volume": res.volume, "geometric": res.geometric,
                         "residual": res.residual, "error": None})
        except (SolveError, StructureError, ValueError) as exc:
            rows.append({"name": name, "volume": None, "geometric": False,
                         "residual": None, "error": str(exc)})
    return rows
