"""Reference computations that share no code with the package.

Everything here works on plain tuples of Fractions or on raw certificate
JSON, so a bug in the package cannot hide behind the same bug here.
"""
from __future__ import annotations

import functools
import itertools
import math
from fractions import Fraction as F


def frac(s):
    if isinstance(s, int):
        return F(s)
    p, _, q = s.partition("/")
    return F(int(p), int(q) if q else 1)


# -- 2D polygon clipping ------------------------------------------------------------

def clip_polygon(rows, big=F(10 ** 6)):
    """Vertices of ``{x in R^2 : a.x <= b for (a, b) in rows}`` by Sutherland-Hodgman clipping.

    Starts from a huge square, so only meaningful for bounded inputs.
    """
    poly = [(-big, -big), (big, -big), (big, big), (-big, big)]
    for (a1, a2), b in rows:
        out = []
        k = len(poly)
        for i in range(k):
            p, q = poly[i], poly[(i + 1) % k]
            fp = a1 * p[0] + a2 * p[1] - b
            fq = a1 * q[0] + a2 * q[1] - b
            if fp <= 0:
                out.append(p)
            if (fp < 0 < fq) or (fq < 0 < fp):
                t = fp / (fp - fq)
                out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
        poly = out
        if not poly:
            return []
    # drop repeats and points lying strictly inside an edge
    uniq = []
    for p in poly:
        if not uniq or uniq[-1] != p:
            uniq.append(p)
    while len(uniq) > 1 and uniq[0] == uniq[-1]:
        uniq.pop()
    k = len(uniq)
    if k <= 2:
        return sorted(set(uniq))
    keep = []
    for i in range(k):
        o, p, q = uniq[i - 1], uniq[i], uniq[(i + 1) % k]
        cross = (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])
        if cross != 0:
            keep.append(p)
    return sorted(set(keep))


def box_vertices(lower, upper):
    return sorted(itertools.product(*[(l, u) if l != u else (l,) for l, u in zip(lower, upper)]))


@functools.lru_cache(maxsize=256)
def _scan_cached(rows, lo, hi):
    return tuple(_scan(rows, lo, hi))


def scan_lattice(rows, lo, hi):
    """Integer points of ``{a.x <= b}`` inside the integer box ``[lo, hi]^n``."""
    return list(_scan_cached(tuple(rows), lo, hi))


def _scan(rows, lo, hi):
    n = len(rows[0][0]) if rows else 0
    out = []
    for z in itertools.product(range(lo, hi + 1), repeat=n):
        if all(sum(a * v for a, v in zip(ai, z)) <= b for ai, b in rows):
            out.append(tuple(F(v) for v in z))
    return out


# -- raw JSON certificate re-verification ----------------------------------------

def _hs(d):
    return tuple(frac(v) for v in d["a"]), frac(d["b"])


def _mults(cert):
    return [(int(i), frac(v)) for i, v in cert["multipliers"]]


def _combine(rows, mults):
    if not rows:
        return None
    n = len(rows[0][0])
    seen = set()
    acc = [F(0)] * n
    rhs = F(0)
    for i, u in mults:
        if i in seen or u < 0 or not 0 <= i < len(rows):
            return None
        seen.add(i)
        a, b = rows[i]
        for j in range(n):
            acc[j] += u * a[j]
        rhs += u * b
    return acc, rhs


def farkas_ok(rows, cert) -> bool:
    if cert.get("kind") != "farkas":
        return False
    c = _combine(rows, _mults(cert))
    return c is not None and all(v == 0 for v in c[0]) and c[1] < 0


def dominance_ok(rows, cert, target) -> bool:
    if cert.get("kind") != "dominance":
        return False
    c = _combine(rows, _mults(cert))
    if c is None:
        return False
    ta, tb = target
    return tuple(c[0]) == tuple(ta) and c[1] <= tb


def normalize(a, b):
    lcm = 1
    for v in a:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in a]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return tuple(F(v // g) for v in ints), b * lcm / g


def _sat(pts, rows):
    return [z for z in pts if all(sum(a * v for a, v in zip(ha, z)) <= hb for ha, hb in rows)]


def _goal_targets(goal):
    kind = goal["type"]
    if kind == "infeasibility":
        return None
    if kind == "hull":
        return [_hs(r) for r in goal["target"]["rows"]]
    if kind == "validity":
        return [_hs(goal["target"])]
    if kind == "membership":
        sep = _hs(goal["separator"])
        x = [frac(v) for v in goal["point"]]
        if sum(a * v for a, v in zip(sep[0], x)) <= sep[1]:
            raise ValueError("separator does not separate")
        return [sep]
    raise ValueError(kind)


def independent_verify(doc, lo=-12, hi=12) -> bool:
    """Re-check a certificate document from scratch; any malformation is a rejection.

    Disjunctions are checked semantically: every lattice point of the node set
    (within the scan box) must satisfy some term.  Cut rounding is checked
    against the supplied source; without a source the certifier alone must
    show the cut lattice-valid.
    """
    try:
        n = doc["context"]["dim"]
        system = [_hs(r) for r in doc["system"]["rows"]]
        if doc["system"]["dim"] != n or any(len(a) != n for a, _ in system):
            return False
        targets = _goal_targets(doc["goal"])
        root = doc["root"]
        if root["label"]:
            return False
        nodes = leaves = 0
        stack = [(root, list(system), scan_lattice(system, lo, hi), False)]
        while stack:
            node, rows, pts, is_cert = stack.pop()
            nodes += 1
            second = node["second"]
            kids = node["children"]
            t = second["type"]
            if t in ("leaf_farkas", "leaf_dominance", "leaf_empty"):
                leaves += 1
                if kids:
                    return False
                if t == "leaf_farkas":
                    if not farkas_ok(rows, second["certificate"]):
                        return False
                elif t == "leaf_dominance":
                    if targets is None or is_cert:
                        return False
                    certs = second["certificates"]
                    for tg in targets:
                        match = [c for c in certs if c.get("kind") == "dominance"
                                 and _hs(c["target"]) == tg]
                        if not match or not dominance_ok(rows, match[0], tg):
                            return False
                else:
                    return False
                continue
            if t == "branch":
                terms = [[_hs(h) for h in term] for term in second["disjunction"]["terms"]]
                if len(kids) != len(terms) or len(terms) < 2:
                    return False
                for z in pts:
                    if not any(all(sum(a * v for a, v in zip(ha, z)) <= hb for ha, hb in term) for term in terms):
                        return False
                for kid, term in zip(kids, terms):
                    if [_hs(h) for h in kid["label"]] != term:
                        return False
                    stack.append((kid, rows + term, _sat(pts, term), False))
            elif t == "cut":
                cut = _hs(second["cut"])
                if all(v == 0 for v in cut[0]) or len(kids) != 2:
                    return False
                a, b = normalize(*cut)
                comp = (tuple(-v for v in a), -F(math.floor(b) + 1))
                left, right = kids
                if [_hs(h) for h in left["label"]] != [comp] or left["children"]:
                    return False
                if left["second"]["type"] != "leaf_farkas":
                    return False
                if not farkas_ok(rows + [comp], left["second"]["certificate"]):
                    return False
                if "source" in second:
                    src = _hs(second["source"])
                    if "source_evidence" not in second or not dominance_ok(rows, second["source_evidence"], src):
                        return False
                    sa, sb = normalize(*src)
                    if (sa, F(math.floor(sb))) != (a, b):
                        return False
                if [_hs(h) for h in right["label"]] != [cut]:
                    return False
                nodes += 1
                leaves += 1
                stack.append((right, rows + [cut], _sat(pts, [cut]), False))
            else:
                return False
        return nodes <= 2 * leaves
    except (KeyError, TypeError, ValueError, IndexError, ZeroDivisionError, AttributeError):
        return False


def claim_holds(doc, lo=-12, hi=12) -> bool:
    """The semantic statement of the goal, by lattice enumeration of the system."""
    system = [_hs(r) for r in doc["system"]["rows"]]
    pts = scan_lattice(system, lo, hi)
    goal = doc["goal"]
    kind = goal["type"]
    if kind == "infeasibility":
        return not pts
    targets = _goal_targets(goal)
    return all(all(sum(a * v for a, v in zip(ta, z)) <= tb for ta, tb in targets) for z in pts)
