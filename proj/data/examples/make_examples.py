"""Regenerates the example input files in this directory.

Usage: python3 make_examples.py
"""

import json
import pathlib

import numpy as np

HERE = pathlib.Path(__file__).resolve().parent
rng = np.random.default_rng(20240611)


def enc(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def density(d, rank=None):
    g = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    r = g @ g.conj().T
    r = (r + r.conj().T) / 2
    return r / np.trace(r).real


def unitary(d):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def states(ms, prefix="theta"):
    return [{"label": f"{prefix}{k}", "matrix": enc(m)} for k, m in enumerate(ms)]


def write(name, doc):
    (HERE / name).write_text(json.dumps(doc, indent=1) + "\n")


sx = np.array([[0, 1], [1, 0]], dtype=complex)
sz = np.diag([1.0, -1.0]).astype(complex)
i2 = np.eye(2)

# rho_theta ⊗ tau with B(C^2) ⊗ 1: sufficient.
tau = density(2)
write("bipartite_product.json", {
    "format_version": "1", "dim": 4, "tensor_dims": [2, 2],
    "states": states([np.kron(density(2), tau) for _ in range(3)]),
    "subalgebra_generators": [enc(np.kron(sx, i2)), enc(np.kron(sz, i2))],
    "channel": {"in_dim": 2, "out_dim": 4,
                "kraus": [enc(np.kron(i2, np.eye(2)[:, [j]])) for j in range(2)]},
})

# Two generic qubit states against the diagonal subalgebra: insufficient.
write("generic_qubits.json", {
    "format_version": "1", "dim": 2,
    "states": states([density(2), density(2)]),
    "subalgebra_generators": [enc(sz)],
})

# Blocks (2,2) and (1,3) in a rotated basis of C^7.
u = unitary(7)
right = [density(2), density(3)]
fam = []
for _ in range(3):
    s = rng.dirichlet([2.0, 2.0])
    m = np.zeros((7, 7), dtype=complex)
    m[:4, :4] = s[0] * np.kron(density(2), right[0])
    m[4:, 4:] = s[1] * right[1]
    fam.append(u @ m @ u.conj().T)
write("two_blocks.json", {"format_version": "1", "dim": 7, "states": states(fam)})

write("single_state.json", {"format_version": "1", "dim": 3, "states": states([density(3)])})

# Generic diagonal family: all blocks (1,1).
diag = [np.diag(rng.dirichlet([1.0] * 4)) for _ in range(3)]
write("classical_diagonal.json", {
    "format_version": "1", "dim": 4, "states": states(diag),
    "subalgebra_generators": [enc(np.diag([1.0, 1.0, 0.0, 0.0]))],
})

write("ssa_product.json", {
    "format_version": "1", "dim": 8, "tensor_dims": [2, 2, 2],
    "states": states([np.kron(np.kron(density(2), density(2)), density(2))], "rho"),
})

# omega = sum_n w_n J_n (D^L_n ⊗ D^R_n) J_n*, H_B = C^2 ⊕ C^3, d_A = d_C = 2.
da, dc, blocks = 2, 2, [(1, 2), (1, 3)]
db = sum(l * r for l, r in blocks)
w = [0.4, 0.6]
omega = np.zeros((da * db * dc,) * 2, dtype=complex)
off = 0
for (dl, dr), wn in zip(blocks, w):
    dn = dl * dr
    jb = np.zeros((db, dn))
    jb[off:off + dn, :] = np.eye(dn)
    j = np.kron(np.kron(np.eye(da), jb), np.eye(dc))
    # A ⊗ L ⊗ R ⊗ C ordering equals A ⊗ (L ⊗ R) ⊗ C.
    comp = np.kron(density(da * dl), density(dr * dc))
    omega += wn * j @ comp @ j.conj().T
    off += dn
write("ssa_equality.json", {
    "format_version": "1", "dim": da * db * dc, "tensor_dims": [da, db, dc],
    "states": states([omega], "rho"),
})

write("ssa_random.json", {
    "format_version": "1", "dim": 8, "tensor_dims": [2, 2, 2],
    "states": states([density(8)], "rho"),
})

# D_xi = exp(xi sigma_z) / Z, mean tanh(xi).
write("qubit_tilt.json", {
    "format_version": "1", "dim": 2,
    "expfam": {"H": enc(np.zeros((2, 2))), "generators": [enc(sz)], "theta": [[0.4], [0.0]]},
})
write("qubit_tilt_outside.json", {
    "format_version": "1", "dim": 2,
    "expfam": {"H": enc(np.zeros((2, 2))), "generators": [enc(sz)], "theta": [[1.5]]},
})

# Family around rho ⊗ tau with generators a ⊗ 1, checked against B(C^2) ⊗ 1
# and the embedding a ↦ a ⊗ 1.
h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
a = (h + h.conj().T) / 2
write("expfam_embedding.json", {
    "format_version": "1", "dim": 4, "tensor_dims": [2, 2],
    "expfam": {"reference": enc(np.kron(density(2), tau)), "generators": [enc(np.kron(a, i2))]},
    "subalgebra_generators": [enc(np.kron(sx, i2)), enc(np.kron(sz, i2))],
    "channel": {"in_dim": 2, "out_dim": 4,
                "kraus": [enc(np.kron(i2, np.eye(2)[:, [j]])) for j in range(2)]},
})

write("empty_states.json", {"format_version": "1", "dim": 2, "states": [],
                            "subalgebra_generators": [enc(sz)]})
