"""Automorphism ensemble decoding: M conjugated constituent decoders plus a
best-correlation (ML-in-the-list) selection, and executable verification of
the SC/permutation commutation properties.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .automorphisms import (AffineAutomorphism, compile_permutation, compose,
                            format_automorphism, mlup_decompose, sample,
                            sample_ensemble)
from .codes import CodeSpec, is_decreasing, polar_transform
from .decoders import (Bp, Sc, Scl, bp_decode_batch, sc_decode_batch,
                       scl_decode_batch)

DecoderConfig = Sc | Scl | Bp


@dataclass(frozen=True)
class EnsembleConfig:
    """Ensemble of `size` constituent decoders conjugated by sampled
    automorphisms from `subgroup` ("ga", "lta", "uta" or "pi").

    With resample_per_frame the automorphisms are redrawn for every decoded
    frame (seeded by frame position); otherwise one fixed set is drawn from
    `seed`.  dedupe forces pairwise-distinct compiled permutations.
    """

    size: int
    subgroup: str
    constituent: DecoderConfig
    resample_per_frame: bool = False
    seed: int = 0
    dedupe: bool = True
    include_identity: bool = False

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("ensemble size must be >= 1")

    def sample_automorphisms(self, m: int, rng=None) -> list[AffineAutomorphism]:
        if rng is None:
            rng = np.random.default_rng(self.seed)
        return sample_ensemble(m, self.subgroup, self.size, rng,
                               dedupe=self.dedupe,
                               include_identity=self.include_identity)


@dataclass
class CandidateSet:
    """Per-candidate results of one ensemble decode.

    x holds the de-interleaved codeword estimates, scores the correlations
    sum_i (-1)^x_i * y_i (-inf for unused list slots), branch the
    originating decoder index (candidates of an SCL constituent share a
    branch).  iterations carries the per-branch BP iteration counts (1 for
    SC/SCL).
    """

    x: np.ndarray
    scores: np.ndarray
    branch: np.ndarray
    permutations: list[AffineAutomorphism]
    iterations: np.ndarray | None = None

    def __len__(self):
        return self.x.shape[0]


def aed_decode(spec: CodeSpec, y, llr, cfg: EnsembleConfig,
               perms: list[AffineAutomorphism]
               ) -> tuple[np.ndarray, int, CandidateSet]:
    """Decode one frame with an automorphism ensemble.

    Branch j decodes the interleaved input apply(pi_j, llr) and its codeword
    estimate is de-interleaved with pi_j^{-1}.  The winner maximises the
    correlation to the received vector y; ties go to the lowest branch
    index, then the lexicographically smallest codeword.  Returns the winner
    estimate, its candidate index and the full candidate set.
    """
    if len(perms) == 0:
        raise ValueError("ensemble needs at least one automorphism")
    if len(perms) != cfg.size:
        raise ValueError(f"got {len(perms)} automorphisms for ensemble size {cfg.size}")
    y = np.asarray(y, dtype=np.float64)
    llr = np.asarray(llr, dtype=np.float64)
    if y.shape != (spec.n,) or llr.shape != (spec.n,):
        raise ValueError(f"y and llr must have length {spec.n}")

    tables = np.stack([compile_permutation(p).table for p in perms])
    x_de, branch, iters, valid = decode_branches(spec, llr[None, :], tables,
                                                 cfg.constituent)
    x_de, branch, iters, valid = x_de[0], branch[0], iters[0], valid[0]
    scores = (1.0 - 2.0 * x_de.astype(np.float64)) @ y
    scores[~valid] = -np.inf
    winner = _select_winner(scores, branch, x_de)
    return x_de[winner], int(winner), CandidateSet(
        x=x_de, scores=scores, branch=branch, permutations=list(perms),
        iterations=iters)


def _select_winner(scores, branch, x) -> int:
    best = scores.max()
    idx = np.flatnonzero(scores == best)
    if idx.size == 1:
        return int(idx[0])
    lowest = idx[branch[idx] == branch[idx].min()]
    return int(min(lowest, key=lambda i: x[i].tobytes()))


def decode_branches(spec: CodeSpec, llrs: np.ndarray, tables: np.ndarray,
                    constituent: DecoderConfig, bp_dtype=np.float64
                    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Run every ensemble branch of a batch of frames.

    llrs is (F, N).  tables holds compiled index tables, either (M, N)
    shared by all frames or (F, M, N) per frame.  Returns de-interleaved
    candidates (F, C, N), branch indices (F, C), per-candidate iteration
    counts (F, C) and a validity mask (F, C) that disqualifies unused list
    slots (short SCL lists).  C = M, or M * list_size for SCL constituents.
    """
    fsz, n = llrs.shape
    shared = tables.ndim == 2
    msz = tables.shape[-2]
    inv = np.argsort(tables, axis=-1)
    if shared:
        permuted = llrs[:, tables].reshape(fsz * msz, n)
        inv_b = inv[None, :, :]
    else:
        permuted = np.take_along_axis(llrs[:, None, :], tables, axis=2)
        permuted = permuted.reshape(fsz * msz, n)
        inv_b = inv

    def deinterleave(x, per_branch):
        x = x.reshape(fsz, msz, per_branch, n)
        idx = np.broadcast_to(inv_b[:, :, None, :], x.shape)
        out = np.take_along_axis(x.reshape(fsz, msz * per_branch, n),
                                 idx.reshape(fsz, msz * per_branch, n), axis=2)
        return out

    branch = np.broadcast_to(np.arange(msz), (fsz, msz))
    if isinstance(constituent, Sc):
        _, x = sc_decode_batch(spec, permuted)
        return (deinterleave(x, 1), branch,
                np.ones((fsz, msz), dtype=np.int64),
                np.ones((fsz, msz), dtype=bool))
    if isinstance(constituent, Bp):
        u, _, it, _ = bp_decode_batch(spec, permuted, constituent.max_iters,
                                      constituent.stopping, constituent.reduce_graph,
                                      dtype=bp_dtype)
        # candidates must be codewords for the correlation selection to be
        # meaningful: re-encode the message estimate (equal to the codeword
        # hard decision whenever the branch converged)
        x = polar_transform(u)
        return (deinterleave(x, 1), branch, it.reshape(fsz, msz),
                np.ones((fsz, msz), dtype=bool))
    if isinstance(constituent, Scl):
        lsz = constituent.list_size
        _, x, pm = scl_decode_batch(spec, permuted, lsz)
        x_de = deinterleave(x.reshape(fsz * msz, lsz, n), lsz)
        branch = np.broadcast_to(np.arange(msz).repeat(lsz), (fsz, msz * lsz))
        valid = np.isfinite(pm).reshape(fsz, msz * lsz)
        iters = np.ones((fsz, msz * lsz), dtype=np.int64)
        return x_de, branch, iters, valid
    raise TypeError(f"unsupported constituent decoder {constituent!r}")


# ---------------------------------------------------------------------------
# executable verification of the commutation properties

@dataclass
class VerificationReport:
    name: str
    trials: int
    failures: int
    details: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def __str__(self):
        state = "ok" if self.passed else "FAIL"
        return f"{self.name}: {self.trials} trials, {self.failures} failures [{state}]"


def verify_lta_commutation(spec: CodeSpec, trials: int,
                           rng: np.random.Generator) -> VerificationReport:
    """Check SC(pi(L)) == pi(SC(L)) bit-exactly for random lower-triangular
    affine pi and random LLRs; the guarantee holds for decreasing monomial
    codes only, so non-decreasing specs are rejected."""
    if not is_decreasing(spec):
        raise ValueError("commutation holds for decreasing monomial codes only")
    failures = 0
    details: list[str] = []
    for t in range(trials):
        aut = sample(spec.m, "lta", rng)
        table = compile_permutation(aut).table
        llr = rng.normal(0.0, 2.0, spec.n)
        _, x_perm = sc_decode_batch(spec, llr[None, table])
        _, x_plain = sc_decode_batch(spec, llr[None, :])
        if not np.array_equal(x_perm[0], x_plain[0][table]):
            failures += 1
            if len(details) < 4:
                details.append(f"trial {t}: {format_automorphism(aut)}")
    return VerificationReport("lta-commutation", trials, failures, details)


def conjugated_sc_branch(spec: CodeSpec, aut: AffineAutomorphism, llr) -> np.ndarray:
    """Codeword estimate of the SC branch conjugated by `aut`.

    The branch interleaves with the compiled inverse permutation and
    de-interleaves with the forward one: because apply() permutes by
    pullback (w_i = v[pi(i)]), composing vector operations reverses
    automorphism composition, and this is the orientation in which a
    lower-triangular left factor cancels against the decoder exactly.  Over
    a whole subgroup the set of branches is unchanged (each element is
    simply relabelled by its inverse).
    """
    fwd = compile_permutation(aut).table
    inv_t = np.empty_like(fwd)
    inv_t[fwd] = np.arange(fwd.size)
    _, x = sc_decode_batch(spec, np.asarray(llr, dtype=np.float64)[None, inv_t])
    return x[0][fwd]


def verify_lta_absorption(spec: CodeSpec, trials: int,
                          rng: np.random.Generator) -> VerificationReport:
    """Check that factoring pi = L o U o P makes the lower-triangular factor
    irrelevant: the conjugated SC branch under pi equals the branch under
    U o P, bit-exactly, for random pi drawn from the full affine group."""
    if not is_decreasing(spec):
        raise ValueError("absorption holds for decreasing monomial codes only")
    failures = 0
    details: list[str] = []
    for t in range(trials):
        aut = sample(spec.m, "ga", rng)
        _, u_part, p_part = mlup_decompose(aut)
        llr = rng.normal(0.0, 2.0, spec.n)
        full = conjugated_sc_branch(spec, aut, llr)
        reduced = conjugated_sc_branch(spec, compose(u_part, p_part), llr)
        if not np.array_equal(full, reduced):
            failures += 1
            if len(details) < 4:
                details.append(f"trial {t}: {format_automorphism(aut)}")
    return VerificationReport("lta-absorption", trials, failures, details)


# ---------------------------------------------------------------------------
# manifest

def constituent_to_dict(dec: DecoderConfig) -> dict:
    if isinstance(dec, Sc):
        return {"kind": "sc"}
    if isinstance(dec, Scl):
        return {"kind": "scl", "list_size": dec.list_size}
    if isinstance(dec, Bp):
        return {"kind": "bp", "max_iters": dec.max_iters, "stopping": dec.stopping,
                "reduce_graph": dec.reduce_graph}
    raise TypeError(f"unsupported decoder {dec!r}")


def constituent_from_dict(d: dict) -> DecoderConfig:
    kind = d["kind"]
    if kind == "sc":
        return Sc()
    if kind == "scl":
        return Scl(list_size=int(d["list_size"]))
    if kind == "bp":
        return Bp(max_iters=int(d["max_iters"]), stopping=bool(d["stopping"]),
                  reduce_graph=bool(d.get("reduce_graph", False)))
    raise ValueError(f"unknown decoder kind {kind!r}")


def ensemble_manifest(cfg: EnsembleConfig, m: int) -> dict:
    """Serializable description sufficient to reproduce the ensemble; fixed
    ensembles list their automorphisms explicitly in the text format."""
    out = {
        "seed": cfg.seed,
        "subgroup": cfg.subgroup,
        "M": cfg.size,
        "resample_per_frame": cfg.resample_per_frame,
        "dedupe": cfg.dedupe,
        "include_identity": cfg.include_identity,
        "constituent": constituent_to_dict(cfg.constituent),
    }
    if not cfg.resample_per_frame:
        out["automorphisms"] = [format_automorphism(a)
                                for a in cfg.sample_automorphisms(m)]
    return out
