"""Finite-chain exact diagonalization oracle.

Independent ground truth for the analytic machinery: the Hamiltonian on
N sites in real space (hopping -J, on-site omega0, TLS energy Omega,
coupling V at the TLS site) restricted to the one- and two-excitation
sectors.  The TLS sits at the central site and boundaries are open by
default, so bound-state tails decay before the boundary and bound-state
energies converge exponentially in N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .band import ModelParams
from .errors import ConvergenceFailure

DENSE_CUTOFF = 60


@dataclass(frozen=True)
class SectorBasis:
    """Excitation-number sector of the chain + TLS Hilbert space."""

    N: int
    sector: str  # one_excitation | two_excitation

    @property
    def dimension(self) -> int:
        n = self.N
        if self.sector == "one_excitation":
            return n + 1
        if self.sector == "two_excitation":
            return n * (n + 1) // 2 + n
        raise ValueError(f"unknown sector {self.sector!r}")


def _pair_index(N: int):
    """Map (j <= l) photon pairs to consecutive indices."""
    idx = {}
    m = 0
    for j in range(N):
        for l in range(j, N):
            idx[(j, l)] = m
            m += 1
    return idx


def build_hamiltonian(N: int, sector: str, params: ModelParams,
                      boundary: str = "open") -> sp.csr_matrix:
    """Real symmetric sparse Hamiltonian in the given excitation sector.

    One-excitation basis: photon at site j (TLS in g) for j < N, then the
    excited TLS with vacuum.  Two-excitation basis: normalized symmetric
    photon pairs |j <= l> followed by photon-at-j with the TLS excited.
    """
    if N < 3:
        raise ValueError("N >= 3 required")
    if boundary not in ("open", "periodic"):
        raise ValueError(f"unknown boundary {boundary!r}")
    w0, J, V, Om = params.omega0, params.J, params.V, params.Omega
    c = N // 2  # TLS site

    bonds = [(j, j + 1) for j in range(N - 1)]
    if boundary == "periodic":
        bonds.append((N - 1, 0))

    rows, cols, vals = [], [], []

    def add(i, j, v):
        rows.append(i)
        cols.append(j)
        vals.append(v)
        if i != j:
            rows.append(j)
            cols.append(i)
            vals.append(v)

    if sector == "one_excitation":
        dim = N + 1
        for j in range(N):
            add(j, j, w0)
        add(N, N, Om)
        for j, l in bonds:
            add(j, l, -J)
        add(c, N, V)
    elif sector == "two_excitation":
        pairs = _pair_index(N)
        npairs = len(pairs)
        dim = npairs + N

        def pidx(j, l):
            return pairs[(j, l) if j <= l else (l, j)]

        for (j, l), m in pairs.items():
            add(m, m, 2.0 * w0)
        # photon hopping in the symmetric pair basis; sqrt(2) where a
        # doubly occupied site is created or destroyed
        rows_h, cols_h, vals_h = [], [], []
        for (j, l), m in pairs.items():
            moves = []
            for a, b in bonds:
                for src, dst in ((a, b), (b, a)):
                    if j == l:
                        if src == j:
                            moves.append(((dst, j), np.sqrt(2.0)))
                    else:
                        if src == j:
                            moves.append(((dst, l),
                                          np.sqrt(2.0) if dst == l else 1.0))
                        if src == l:
                            moves.append(((j, dst),
                                          np.sqrt(2.0) if dst == j else 1.0))
            for (a, b), amp in moves:
                mm = pidx(a, b)
                if mm >= m:
                    continue  # add upper triangle once; symmetrized below
                rows_h.append(m)
                cols_h.append(mm)
                vals_h.append(-J * amp)
        for i, jj, v in zip(rows_h, cols_h, vals_h):
            add(i, jj, v)

        for j in range(N):
            add(npairs + j, npairs + j, w0 + Om)
        for a, b in bonds:
            add(npairs + a, npairs + b, -J)
        # V (a_c^dag sigma^- + h.c.): |j, e> <-> |{j, c}>, sqrt(2) at j = c
        for j in range(N):
            amp = V * (np.sqrt(2.0) if j == c else 1.0)
            add(pidx(j, c), npairs + j, amp)
    else:
        raise ValueError(f"unknown sector {sector!r}")

    H = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    H.sum_duplicates()
    return H


def _localization(vec: np.ndarray, N: int, sector: str) -> float:
    """Weight of the eigenvector within |j - c| <= N // 10 of the TLS site
    (TLS-excited components count as on-site)."""
    c = N // 2
    win = max(N // 10, 2)
    w = 0.0
    if sector == "one_excitation":
        for j in range(N):
            if abs(j - c) <= win:
                w += abs(vec[j]) ** 2
        w += abs(vec[N]) ** 2
    else:
        m = 0
        for j in range(N):
            for l in range(j, N):
                if abs(j - c) <= win and abs(l - c) <= win:
                    w += abs(vec[m]) ** 2
                m += 1
        for j in range(N):
            if abs(j - c) <= win:
                w += abs(vec[m + j]) ** 2
    return float(w / np.dot(vec, vec))


def discrete_spectrum(N: int, sector: str, params: ModelParams,
                      boundary: str = "open", k: int = 4):
    """Extremal eigenvalues with localization measures.

    Returns a list of (energy, localization) sorted by energy: the k
    lowest and k highest levels of the sector (dense solve for small N).

    Raises
    ------
    ConvergenceFailure
        If the iterative eigensolver does not converge.
    """
    H = build_hamiltonian(N, sector, params, boundary)
    dim = H.shape[0]
    if N <= DENSE_CUTOFF:
        evals, evecs = np.linalg.eigh(H.toarray())
        order = np.argsort(evals)
        sel = list(order[:k]) + list(order[-k:])
    else:
        try:
            lo_vals, lo_vecs = eigsh(H, k=k, which="SA", tol=0,
                                     maxiter=20000)
            hi_vals, hi_vecs = eigsh(H, k=k, which="LA", tol=0,
                                     maxiter=20000)
        except ArpackNoConvergence as exc:
            raise ConvergenceFailure(str(exc)) from exc
        evals = np.concatenate([lo_vals, hi_vals])
        evecs = np.concatenate([lo_vecs, hi_vecs], axis=1)
        sel = list(np.argsort(evals))
    out = []
    for i in sel:
        out.append((float(evals[i]), _localization(np.asarray(evecs[:, i]),
                                                   N, sector)))
    out.sort(key=lambda t: t[0])
    return out


def extremal_energies(N: int, sector: str, params: ModelParams,
                      boundary: str = "open") -> tuple:
    """(lowest, highest) eigenvalue of the sector."""
    spec = discrete_spectrum(N, sector, params, boundary, k=1)
    return spec[0][0], spec[-1][0]
