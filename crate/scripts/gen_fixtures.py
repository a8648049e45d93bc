"""Writes the fixture Hamiltonians and their expected-value sidecars.

Everything here is computed with dense numpy matrices, independently of the
Rust code. Run from the repository root: python3 scripts/gen_fixtures.py
"""
import json
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "fixtures"
PAULI = {
    "I": np.eye(2),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "Z": np.diag([1.0, -1.0]),
}


def word_matrix(word):
    m = np.eye(1)
    for c in word:
        m = np.kron(m, PAULI[c])
    return m


def ham_matrix(terms):
    return sum(c * word_matrix(w) for c, w in terms) / len(terms)


def random_terms(rng, n, m):
    terms = []
    while len(terms) < m:
        word = "".join(rng.choice(list("IXZ"), size=n))
        if word == "I" * n:
            continue
        coeff = float(np.round(rng.uniform(-1, 1), 3))
        terms.append((coeff, word))
    return terms


def power_iteration(h, iters=20000):
    # largest eigenvalue of (cI - H) with c above the spectral radius
    c = np.abs(h).sum(axis=1).max() + 1.0
    a = c * np.eye(len(h)) - h
    v = np.ones(len(h)) / np.sqrt(len(h))
    for _ in range(iters):
        w = a @ v
        v = w / np.linalg.norm(w)
    return c - v @ a @ v


def witnesses(n, ground):
    zero = np.zeros(2**n)
    zero[0] = 1.0
    plus = np.ones(2**n) / np.sqrt(2**n)
    return {"ground": ground, "zero": zero, "plus": plus}


def fixture(name, n, k, terms):
    h = ham_matrix(terms)
    vals, vecs = np.linalg.eigh(h)
    lam0 = float(vals[0])
    ground = vecs[:, 0]
    gamma = sum(abs(c) for c, _ in terms) / len(terms)
    doc = {"n": n, "k": k, "terms": [{"coeff": c, "pauli": w} for c, w in terms]}
    (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")
    energies = {key: float(v @ h @ v) for key, v in witnesses(n, ground).items()}
    semi = {
        key: {str(p): 1.0 - p * (gamma / 2 + e / 2) for p in (0.1, 0.5)}
        for key, e in energies.items()
    }
    sidecar = {
        "lambda0": lam0,
        "lambda0_power_iteration": float(power_iteration(h)),
        "gamma": gamma,
        "m": len(terms),
        "energies": energies,
        "semi_honest_value": semi,
        "energy_maximally_mixed": float(np.trace(h) / 2**n),
    }
    (OUT / f"{name}.expected.json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


def main():
    OUT.mkdir(exist_ok=True)
    rng = np.random.default_rng(20240601)
    fixture("Z", 1, 1, [(1.0, "Z")])
    fixture("ZZ", 2, 2, [(1.0, "ZZ")])
    fixture("mixed-2term", 2, 2, [(0.5, "XI"), (-1.0, "ZZ")])
    fixture("random-3qubit", 3, 3, random_terms(rng, 3, 5))
    fixture("shifted-2qubit", 2, 2, [(1.0, "II"), (0.5, "ZZ")])


if __name__ == "__main__":
    main()
