"""Brute-force discovery of a partial-SWAP circuit layout.

The search enumerates every two-wire circuit with exactly four CNOTs and at
most six single-qubit gates from the fixed set, probes each compiled unitary
for membership in the partial-SWAP family at a single parameter value, and
confirms surviving candidates against ``verify_decomposition`` for all
requested n.  A candidate is a sequence

    seg0, CNOT, seg1, CNOT, seg2, CNOT, seg3, CNOT, seg4

where each segment is a (possibly empty) run of single-qubit gates.
Candidates are examined in lexicographic order of the key

    (seg0, o1, seg1, o2, seg2, o3, seg3, o4, seg4)

with segments compared as tuples of symbol ids (symbols sorted by
(gate name, wire), prefixes first) and CNOT orientations ordered
(0,1) < (1,0); the first confirmed candidate wins, deterministically.

Segments are kept canonical to avoid re-testing equivalent orderings:
adjacent gates on different wires are stored wire-ascending, adjacent
commuting diagonal gates on one wire are stored sorted, and adjacent
inverse ry pairs are dropped.  The printed rz(-2 eta) gate is a pure global
phase, so it is excluded from the search alphabet (it can never affect
phase-equivalence); the corrected variant is included when
``rz_variant="corrected"``.

For speed the family-membership probe is evaluated in bulk: heads
(seg0..CNOT3) stream in enumeration order while all tails (seg3, CNOT4,
seg4) are precompiled, and tr(P +/- . tail . head) reduces to one complex
GEMM per block.  Everything is exact linear algebra with no randomness, so
results are reproducible; the scan also short-circuits monomial circuits by
requiring a non-trivial mixing angle at the probe.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .circuit import (
    CircuitSpec,
    DecompositionReport,
    _reference_gate,
    layout_to_circuit,
    verify_decomposition,
)
from .homogenizer import swap_operator
from .states import ID2, kron

_DIAGONAL_NAMES = frozenset({"u1", "rz_eta", "rz_2eta", "rz_2eta_corrected"})
_PRINTED_NAMES = ("ry_minus", "ry_plus", "rz_eta", "u1")
_CORRECTED_NAMES = ("ry_minus", "ry_plus", "rz_2eta_corrected", "rz_eta", "u1")


class SearchExhaustedError(RuntimeError):
    """No layout in the search space verified against the partial-SWAP family."""


@dataclass
class SearchResult:
    """Outcome of a successful layout search."""

    layout: tuple                      # ((name, wires), ...) in circuit order
    probe_n: int
    rz_variant: str
    thetas: dict                       # n -> realized swap angle
    reports: list = field(default_factory=list)
    heads_scanned: int = 0
    candidates_tested: int = 0
    rejected_confirmations: int = 0
    elapsed_seconds: float = 0.0


def _symbols(rz_variant: str):
    names = _PRINTED_NAMES if rz_variant == "printed" else _CORRECTED_NAMES
    syms = [(name, wire) for name in sorted(names) for wire in (0, 1)]
    return syms


def _embedded(gate_matrix: np.ndarray, wire: int) -> np.ndarray:
    return kron(gate_matrix, ID2) if wire == 0 else kron(ID2, gate_matrix)


def _canonical_next(prev, nxt, prev_id, nxt_id):
    """Allow symbol ``nxt`` directly after ``prev`` in a canonical segment."""
    (p_name, p_wire), (n_name, n_wire) = prev, nxt
    if p_wire != n_wire:
        return p_wire < n_wire
    if p_name in _DIAGONAL_NAMES and n_name in _DIAGONAL_NAMES:
        return nxt_id >= prev_id
    if {p_name, n_name} == {"ry_plus", "ry_minus"}:
        return False
    return True


def _build_segment_table(symbols, probe_n: int, max_len: int):
    """All canonical single-qubit gate runs up to ``max_len``, in lex order.

    Returns (tuple_of_symbol_ids, matrix, length) triples; the matrix is the
    compiled product of the run in circuit order at parameter ``probe_n``.
    """
    mats = [_embedded(_reference_gate(name, probe_n, (wire,)).matrix, wire)
            for name, wire in symbols]
    entries = []

    def extend(syms, mat):
        entries.append((syms, mat, len(syms)))
        if len(syms) == max_len:
            return
        last = syms[-1] if syms else None
        for sid, sym in enumerate(symbols):
            if last is not None and not _canonical_next(symbols[last], sym, last, sid):
                continue
            extend(syms + (sid,), mats[sid] @ mat)

    extend((), np.eye(4, dtype=complex))
    return entries


def _build_tails(table, cnot_mats, max_singles: int):
    """Precompile every (seg3, CNOT, seg4) tail in enumeration order.

    Returns flattened-transpose matrices (for the trace GEMM), per-tail gate
    budgets, and (i3, o4, i4) metadata to reconstruct symbol sequences.
    """
    lengths = np.array([e[2] for e in table])
    mats = np.stack([e[1] for e in table])
    blocks, budgets, meta = [], [], []
    for i3, (_, m3, n3) in enumerate(table):
        for o4 in (0, 1):
            base = cnot_mats[o4] @ m3
            idx4 = np.flatnonzero(lengths <= max_singles - n3)
            block = mats[idx4] @ base
            blocks.append(block.transpose(0, 2, 1).reshape(len(idx4), 16))
            budgets.append(n3 + lengths[idx4])
            meta.append(np.column_stack([
                np.full(len(idx4), i3), np.full(len(idx4), o4), idx4]))
    flat = np.concatenate(blocks, axis=0)
    return flat, np.concatenate(budgets), np.concatenate(meta, axis=0)


def _iter_heads(table, cnot_mats, max_singles: int):
    """Yield ((i0, o1, i1, o2, i2, o3), head_matrix, singles_used) in order."""
    for i0, (_, m0, n0) in enumerate(table):
        for o1 in (0, 1):
            p1 = cnot_mats[o1] @ m0
            for i1, (_, m1, n1) in enumerate(table):
                if n0 + n1 > max_singles:
                    continue
                for o2 in (0, 1):
                    p3 = cnot_mats[o2] @ m1 @ p1
                    for i2, (_, m2, n2) in enumerate(table):
                        used = n0 + n1 + n2
                        if used > max_singles:
                            continue
                        p5 = m2 @ p3
                        for o3 in (0, 1):
                            yield (i0, o1, i1, o2, i2, o3), cnot_mats[o3] @ p5, used


def _candidate_layout(head_meta, tail_meta, table, symbols):
    i0, o1, i1, o2, i2, o3 = head_meta
    i3, o4, i4 = tail_meta
    orientations = {0: (0, 1), 1: (1, 0)}
    layout = []
    for seg, cnot in ((i0, o1), (i1, o2), (i2, o3), (i3, o4)):
        layout.extend((symbols[s][0], (symbols[s][1],)) for s in table[seg][0])
        layout.append(("cnot", orientations[cnot]))
    layout.extend((symbols[s][0], (symbols[s][1],)) for s in table[i4][0])
    return tuple(layout)


def _confirm(layout, confirm_ns, confirm_tol, min_theta_spread):
    reports = []
    for n in confirm_ns:
        report = verify_decomposition(n, layout_to_circuit(layout, n), tol=confirm_tol)
        if not report.equivalent:
            return None
        reports.append(report)
    thetas = [abs(r.realized_theta) for r in reports]
    if max(thetas) - min(thetas) < min_theta_spread:
        return None  # constant-angle layout (e.g. a plain SWAP), not a tunable family
    return reports


def find_partial_swap_layout(probe_n: int = 3, *, rz_variant: str = "printed",
                             max_singles: int = 6, confirm_ns=tuple(range(1, 9)),
                             residual_tol: float = 1e-9, min_sin: float = 0.05,
                             confirm_tol: float = 1e-10, min_theta_spread: float = 1e-3,
                             round_size: int = 512, tail_tile: int = 8192,
                             progress=None) -> SearchResult:
    """Search the full gate-budget space for a verified partial-SWAP layout.

    ``probe_n`` selects the parameter value used for the bulk family test;
    every probe hit is re-verified at all ``confirm_ns`` before being
    accepted.  Raises ``SearchExhaustedError`` if the space is exhausted.
    """
    if rz_variant not in ("printed", "corrected"):
        raise ValueError(f"unknown rz_variant {rz_variant!r}")
    start = time.monotonic()
    symbols = _symbols(rz_variant)
    cnot_mats = (_reference_gate("cnot", probe_n, (0, 1)).matrix,
                 _reference_gate("cnot", probe_n, (1, 0)).matrix)
    table = _build_segment_table(symbols, probe_n, max_singles)
    tails_flat, tail_budgets, tail_meta = _build_tails(table, cnot_mats, max_singles)
    tail_idx = {r: np.flatnonzero(tail_budgets <= r) for r in range(max_singles + 1)}

    swap = swap_operator()
    p_plus = (np.eye(4) + swap) / 2
    p_minus = (np.eye(4) - swap) / 2

    heads_scanned = 0
    candidates = 0
    rejected = 0
    round_meta, round_mats, round_used = [], [], []

    def process_round():
        nonlocal candidates, rejected
        used = np.array(round_used)
        h_stack = np.stack(round_mats)
        a_plus = (h_stack @ p_plus).reshape(len(round_mats), 16)
        a_minus = (h_stack @ p_minus).reshape(len(round_mats), 16)
        hits = []
        for budget in np.unique(used):
            rows = np.flatnonzero(used == budget)
            idx = tail_idx[max_singles - budget]
            for lo in range(0, len(idx), tail_tile):
                cols = idx[lo:lo + tail_tile]
                tf = tails_flat[cols]
                cp = a_plus[rows] @ tf.T
                cm = a_minus[rows] @ tf.T
                candidates += cp.size
                resid_sq = 4.0 - (np.abs(cp) ** 2) / 3.0 - np.abs(cm) ** 2
                mask = (resid_sq <= residual_tol ** 2) & \
                       (np.abs(cp / 3.0 - cm) >= 2.0 * min_sin)
                if mask.any():
                    for r, c in zip(*np.nonzero(mask)):
                        hits.append((int(rows[r]), int(cols[c])))
        for head_row, tail_rank in sorted(hits):
            layout = _candidate_layout(round_meta[head_row], tail_meta[tail_rank],
                                       table, symbols)
            reports = _confirm(layout, confirm_ns, confirm_tol, min_theta_spread)
            if reports is None:
                rejected += 1
                continue
            return layout, reports
        return None

    for meta, mat, used in _iter_heads(table, cnot_mats, max_singles):
        round_meta.append(meta)
        round_mats.append(mat)
        round_used.append(used)
        heads_scanned += 1
        if len(round_meta) >= round_size:
            found = process_round()
            if found:
                layout, reports = found
                return SearchResult(
                    layout=layout, probe_n=probe_n, rz_variant=rz_variant,
                    thetas={r.n: r.realized_theta for r in reports}, reports=reports,
                    heads_scanned=heads_scanned, candidates_tested=candidates,
                    rejected_confirmations=rejected,
                    elapsed_seconds=time.monotonic() - start)
            round_meta, round_mats, round_used = [], [], []
            if progress and heads_scanned % (round_size * 64) == 0:
                progress(heads_scanned, candidates)
    if round_meta:
        found = process_round()
        if found:
            layout, reports = found
            return SearchResult(
                layout=layout, probe_n=probe_n, rz_variant=rz_variant,
                thetas={r.n: r.realized_theta for r in reports}, reports=reports,
                heads_scanned=heads_scanned, candidates_tested=candidates,
                rejected_confirmations=rejected,
                elapsed_seconds=time.monotonic() - start)
    raise SearchExhaustedError(
        f"no verified layout with 4 CNOTs and <= {max_singles} single-qubit gates "
        f"({candidates} candidates tested, rz_variant={rz_variant!r})")


def verify_layout(layout, ns=tuple(range(1, 9)), *, tol: float = 1e-10):
    """Run ``verify_decomposition`` for a symbolic layout at each n."""
    return [verify_decomposition(n, layout_to_circuit(layout, n), tol=tol) for n in ns]
