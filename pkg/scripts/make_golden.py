"""Freeze tests/golden/derived.json from the independent oracles in tests/oracles.py.

Inputs are drawn with a fixed numpy seed and stored next to the expected
outputs, so the golden tests never need to regenerate them.
"""
import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracles as O  # noqa: E402

EPS = 0.01


def cplx(a):
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def hermitian(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


def step_pairs(rng, k):
    vals = np.sort(rng.uniform(0.1, 3.0, k))[::-1]
    return [[float(v), float(ln)] for v, ln in zip(vals, rng.uniform(0.2, 2.0, k))]


def dyadic_case(rng, n=16, levels=4, weighted=True):
    w = rng.uniform(0.5, 2.0, n) if weighted else np.ones(n)
    x = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
    return w, x, O.dyadic_atoms(n, levels)


def case_inputs(w, x, levels):
    return {"weights": w.tolist(), "x": cplx(x), "levels": levels}


def build(seed):
    rng = np.random.default_rng(seed)
    out = []

    def add(name, inputs, expected, tol, note):
        out.append({"name": name, "inputs": inputs, "expected": expected, "tol": tol,
                    "oracle": note})

    # tensor partial trace on M_2 ⊗ M_2
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    x = np.kron(a, b)
    add("tensor_expectation", {"a": cplx(a), "b": cplx(b)},
        {"e1": cplx(O.partial_trace_level(x, 2, 2))}, 1e-12, "explicit index sums")

    h = hermitian(rng, 4)
    med = float(np.median(np.linalg.eigvalsh(h)))
    add("spectral_projection", {"h": cplx(h), "a": 0.0, "b": med},
        {"p": cplx(O.eig_projection(h, 0.0, med))}, 1e-10, "eigenprojection sum")

    h = hermitian(rng, 5)
    add("calculus_square", {"h": cplx(h)}, {"y": cplx(h @ h)}, 1e-10, "matrix product")

    nil = np.array([[0, 1], [0, 0]], dtype=complex)
    s = O.abs_values(nil)
    add("mu_nilpotent", {"x": cplx(nil)},
        {"steps": [[float(v), 1.0] for v in sorted(s, reverse=True) if v > 1e-12]}, 1e-12,
        "eigensolver on x*x")

    for i in range(3):
        f = step_pairs(rng, 6)
        add("integrate_power", {"f": f, "p": 2.0},
            {"value": O.riemann_power(f, 2.0)}, 1e-9, "Riemann sum")

    for i in range(3):
        f = step_pairs(rng, 7)
        p = [1.5, 2.0, 3.0][i]
        add("lorentz_weak", {"f": f, "p": p},
            {"value": O.lorentz_sup_grid(f, p)}, 1e-9, "fine grid sup")

    blocks = [[2, 0.5], [3, 1.5]]
    mats = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for d, _ in blocks]
    mod = sum(wt * float(np.sum(O.two_power(O.abs_values(m), 1.0, 2.0)))
              for m, (_, wt) in zip(mats, blocks))
    add("orlicz_modular", {"blocks": blocks, "mats": [cplx(m) for m in mats],
                           "phi": {"family": "two_power", "p": 1.0, "q": 2.0}},
        {"value": mod}, 1e-10, "eigensolver sum of weights times Phi")

    grid = np.logspace(-3, 3, 25)
    add("theta_transform_inverse", {"theta": 0.5, "s": grid.tolist()},
        {"inverse": np.sqrt(O.two_power_12_inverse(grid)).tolist()}, 1e-9, "direct evaluation")

    cases = []
    for i in range(12):
        f = step_pairs(rng, int(rng.integers(1, 7)))
        t = float(np.exp(rng.uniform(-2, 1.5)))
        ref = math.sqrt(O.integral_upto(f, t * t, 2))
        cases.append({"f": f, "t": t, "brute": O.truncation_brute(f, t, 2.0), "ref": ref})
    add("truncation_l2", {"cases": [{"f": c["f"], "t": c["t"]} for c in cases]},
        {"brute": [c["brute"] for c in cases], "ref": [c["ref"] for c in cases]}, 1e-7,
        "grid search over the truncation level")

    rows = []
    for theta in (0.3, 0.5, 0.7):
        for q in (1.0, 2.0, 3.0):
            for t in (0.01, 0.5, 3.0, 200.0):
                c = (theta * q) ** (-1 / q) + ((1 - theta) * q) ** (-1 / q)
                rows.append([theta, q, t, t ** (1 - theta) * c])
    add("rho_power", {"rows": [r[:3] for r in rows]}, {"rho": [r[3] for r in rows]}, 1e-10,
        "closed form power integrals")

    # commutative dyadic cases
    w, x, atoms = dyadic_case(rng)
    _, d = O.scalar_martingale(x, w, atoms)
    add("square_functions_dyadic", case_inputs(w, x, 4),
        {"S_c": O.big_square(d).tolist(), "s_c": O.cond_square(d, w, atoms).tolist(),
         "h1c": O.lp_norm(O.cond_square(d, w, atoms), w, 1.0)}, 1e-10, "scalar brute force")

    w, x, atoms = dyadic_case(rng, n=8, levels=3)
    add("bmo_dyadic", case_inputs(w, x, 3), {"bmo": O.little_bmo(x, w, atoms)}, 1e-10,
        "scalar enumeration")

    n = 6
    labels = [[0, 1, 2, 3, 4, 5], [0, 0, 1, 1, 2, 2], [0, 0, 0, 0, 1, 1], [0] * n]
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    diffs = O.pinching_differences(x, labels)
    sc = sum(dk.conj().T @ dk for dk in diffs)
    sr = sum(dk @ dk.conj().T for dk in diffs)
    partitions = [[[i for i in range(n) if lab[i] == a] for a in sorted(set(lab))]
                  for lab in labels]
    add("intersection_norm", {"x": cplx(x), "partitions": partitions, "p": 1.0},
        {"Hc": O.schatten_of_square(sc, 1.0), "Hr": O.schatten_of_square(sr, 1.0)}, 1e-10,
        "direct eigenvalue evaluation of S_c and S_r")

    w, x, atoms = dyadic_case(rng)
    _, d = O.scalar_martingale(x, w, atoms)
    partial = np.cumsum([O.cond_exp(np.abs(dk) ** 2, w, atoms, k - 1).real
                         for k, dk in enumerate(d, 1)], axis=0)
    lam2 = float(np.median(partial[-1]))
    q = O.stopping_projections(list(partial), lam2)
    add("cuculescu_dyadic", dict(case_inputs(w, x, 4), lam2=lam2),
        {"q": [qk.tolist() for qk in q]}, 1e-12, "scalar stopping time")

    w, x, atoms = dyadic_case(rng)
    ts = [0.05, 0.3, 1.0, 2.5]
    _, d = O.scalar_martingale(x, w, atoms)
    sc = O.cond_square(d, w, atoms)
    add("lambda_dyadic", dict(case_inputs(w, x, 4), t=ts, eps=EPS),
        {"lambda": [(2 + EPS) / t * O.k_ref_scalar(sc, w, t) for t in ts]}, 1e-10,
        "integral of the rearranged square")

    w, x, atoms = dyadic_case(rng)
    dec = []
    for t in (0.2, 0.8, 2.0):
        y, z, data = O.jones_scalar(x, w, atoms, t, EPS)
        dec.append({"t": t, "y": cplx(y), "z": cplx(z), **data})
    add("jones_dyadic", case_inputs(w, x, 4), {"decompositions": dec}, 1e-10,
        "scalar stopping-time recursion")

    cases = []
    for i in range(6):
        f = step_pairs(rng, int(rng.integers(2, 6)))
        t = float(np.exp(rng.uniform(-1.5, 1.5)))
        cases.append({"f": f, "t": t, "split": O.split_search_12(f, t)})
    add("holmstedt_12", {"cases": [{"f": c["f"], "t": c["t"]} for c in cases]},
        {"split": [c["split"] for c in cases], "constant": 4.0}, 0.0,
        "discretized split search")

    rows = []
    for theta in (0.25, 0.5, 0.75):
        for gamma in (1.0, 2.0, 4.0):
            rows.append([theta, gamma, 0.7 ** (1 - theta)])
    add("interp_indicator", {"a": 0.7, "rows": [r[:2] for r in rows]},
        {"norm": [r[2] for r in rows]}, 1e-3, "closed form of the L_{p,gamma} indicator norm")

    factors = np.geomspace(1 / 16, 16, 17)
    for seed_case in range(2):
        w, x, atoms = dyadic_case(rng, n=8, levels=3)
        _, d = O.scalar_martingale(x, w, atoms)
        sc = O.cond_square(d, w, atoms)
        tstar = math.sqrt(sum(w * sc ** 2)) / sc.max()
        grid = (tstar * np.logspace(-3, 3, 33)).tolist()
        lower, upper = O.scalar_hardy_curve(x, w, atoms, grid, EPS, factors)
        add("k_closedness_dyadic", dict(case_inputs(w, x, 3), grid=grid, eps=EPS),
            {"lower": lower, "upper": upper,
             "ratio": max(u / lo for u, lo in zip(upper, lower))}, 1e-9, "scalar pipeline")

    x1 = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    s = O.abs_values(x1)
    f = O.sorted_steps(s, np.ones(4))
    grid = np.logspace(-1.5, 1.5, 9).tolist()
    add("single_step_curve", {"x": cplx(x1), "grid": grid},
        {"k": [O.truncation_brute([list(p) for p in f], t, 2.0) for t in grid], "bound": 2.0},
        1e-7, "truncation split oracle on mu(|x_1|)")

    w, x, atoms = dyadic_case(rng, n=8, levels=3)
    _, d = O.scalar_martingale(x, w, atoms)
    sc = O.cond_square(d, w, atoms)
    steps = O.sorted_steps(sc, w)
    inv0 = lambda s: _theta_inverse(s, 1.0 / 3.0)  # noqa: E731
    add("orlicz_target_dyadic", case_inputs(w, x, 3),
        {"rhs": O.orlicz_lorentz_sup(steps, inv0)}, 1e-9,
        "sup over level sets of s times the indicator norm")

    w, x, atoms = dyadic_case(rng)
    g = [(rng.standard_normal(16) + 1j * rng.standard_normal(16)) / math.sqrt(2) for _ in range(4)]
    pos = [np.abs(gk) ** 2 for gk in g]
    lhs, rhs = O.dual_doob_scalar(pos, w, atoms, 2.0)
    add("dual_doob_dyadic_l2", dict(case_inputs(w, x, 4), terms=[p.tolist() for p in pos]),
        {"lhs": lhs, "rhs": rhs}, 1e-10, "scalar conditional expectations")

    lhs, rhs = O.lepingle_yor_scalar(g, w, atoms, 1.0)
    add("lepingle_yor_dyadic_l1", dict(case_inputs(w, x, 4), terms=[cplx(gk) for gk in g]),
        {"lhs": lhs, "rhs": rhs}, 1e-10, "scalar conditional expectations")

    w, x, atoms = dyadic_case(rng)
    add("hardy_dyadic_l1", case_inputs(w, x, 4), O.hardy_scalar(x, w, atoms, 1.0), 1e-10,
        "scalar square functions")

    w, x, atoms = dyadic_case(rng)
    add("davis_dyadic_l1", case_inputs(w, x, 4), O.davis_scalar(x, w, atoms, 1.0), 1e-10,
        "scalar square functions")
    return out


def _theta_inverse(s, theta):
    """``(Phi^{-1})^(1 - theta)`` for ``Phi = (t + t^2)/2``."""
    return float(O.two_power_12_inverse(s)) ** (1 - theta)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=20240611)
    ap.add_argument("--out", default=str(ROOT / "tests" / "golden" / "derived.json"))
    args = ap.parse_args(argv)
    doc = {"seed": args.seed, "entries": build(args.seed)}
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(doc['entries'])} entries to {args.out}")


if __name__ == "__main__":
    main()
