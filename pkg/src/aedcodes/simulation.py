"""BPSK/AWGN channel, Monte-Carlo error-rate harness and brute-force ML
oracle.

Every frame draws its message and noise from streams derived from
(channel seed, frame index), so runs are reproducible bit-for-bit, results
never depend on batching or worker count, and different decoder
configurations under the same channel seed see identical noise (paired
comparisons).  Monte-Carlo BP decoding runs with float32 messages for
throughput; the decoder APIs themselves default to float64.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .automorphisms import compile_tables
from .codes import (CODEBOOK_K_MAX, CapacityError, CodeSpec, encode,
                    polar_transform)
from .decoders import (Bp, L_MAX, Sc, Scl, bp_decode_batch, saturate,
                       sc_decode_batch, scl_decode_batch)
from .ensemble import EnsembleConfig, decode_branches

BATCH_FRAMES = 256  # fixed evaluation granularity; results are independent of it
_BP_MC_DTYPE = np.float32


@dataclass(frozen=True)
class ChannelConfig:
    """BI-AWGN channel at Eb/N0 `ebn0_db` for a code of rate `rate`."""

    ebn0_db: float
    rate: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError(f"rate {self.rate} outside (0, 1]")

    @property
    def sigma(self) -> float:
        """Noise standard deviation: sigma^2 = 1 / (2 R 10^(Eb/N0 / 10))."""
        return float(1.0 / np.sqrt(2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0)))


@dataclass
class SimRecord:
    """Accumulated statistics of one Monte-Carlo run."""

    frames: int
    block_errors: int
    bit_errors: int
    info_bits: int
    avg_iterations: float
    wall_seconds: float

    @property
    def bler(self) -> float:
        return self.block_errors / self.frames if self.frames else 0.0

    @property
    def ber(self) -> float:
        total = self.frames * self.info_bits
        return self.bit_errors / total if total else 0.0


def transmit(spec: CodeSpec, u, ch: ChannelConfig, rng: np.random.Generator
             ) -> tuple[np.ndarray, np.ndarray]:
    """Encode, BPSK-map (bit 0 -> +1) and add white Gaussian noise.

    Returns the received vector y and the channel LLRs 2 y / sigma^2,
    saturated to +-L_MAX.
    """
    u = np.asarray(u, dtype=np.uint8)
    if u.shape != (spec.k,):
        raise ValueError(f"message length {u.shape} != k={spec.k}")
    x = encode(spec, u)
    y = (1.0 - 2.0 * x) + rng.normal(0.0, ch.sigma, spec.n)
    return y, saturate(2.0 * y / ch.sigma ** 2)


def ml_decode_oracle(spec: CodeSpec, y) -> np.ndarray:
    """Exhaustive maximum-likelihood decision: the codeword maximising
    sum_i (-1)^x_i y_i; ties resolved to the lexicographically smallest
    codeword.  Only feasible for k <= CODEBOOK_K_MAX."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (spec.n,):
        raise ValueError(f"received vector length {y.shape} != N={spec.n}")
    if spec.k > CODEBOOK_K_MAX:
        raise CapacityError(f"k={spec.k} exceeds ML enumeration cap {CODEBOOK_K_MAX}")
    if spec.k == 0:
        return np.zeros(spec.n, dtype=np.uint8)
    best_score = -np.inf
    best = None
    chunk = 1 << 14
    for lo in range(0, 1 << spec.k, chunk):
        hi = min(lo + chunk, 1 << spec.k)
        nums = np.arange(lo, hi, dtype=np.uint64)[:, None]
        msgs = ((nums >> np.arange(spec.k, dtype=np.uint64)[None, :]) & 1).astype(np.uint8)
        cws = encode(spec, msgs)
        scores = (1.0 - 2.0 * cws) @ y
        mx = scores.max()
        if mx < best_score:
            continue
        cand = min(cws[scores == mx], key=lambda c: c.tobytes())
        if mx > best_score or cand.tobytes() < best.tobytes():
            best_score = mx
            best = cand.copy()
    return best


# ---------------------------------------------------------------------------
# Monte-Carlo loop

def _frame_streams(seed: int, frame: int) -> tuple:
    """Independent (message, noise, ensemble) child streams for one frame."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(frame,)).spawn(3)


def _eval_chunk(spec: CodeSpec, decoder, ch: ChannelConfig, lo: int, hi: int,
                all_zero: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Transmit and decode frames lo..hi-1; returns per-frame block-error
    flags, bit-error counts, summed branch iterations and branch-run counts.

    Results for a frame depend only on (spec, decoder, ch, frame index)."""
    fsz = hi - lo
    n, k = spec.n, spec.k
    sigma = ch.sigma
    msgs = np.zeros((fsz, k), dtype=np.uint8)
    noise = np.empty((fsz, n))
    for t in range(fsz):
        msg_ss, noise_ss, _ = _frame_streams(ch.seed, lo + t)
        if not all_zero:
            msgs[t] = np.random.default_rng(msg_ss).integers(0, 2, k, dtype=np.uint8)
        noise[t] = np.random.default_rng(noise_ss).normal(0.0, sigma, n)
    x_true = encode(spec, msgs)
    y = (1.0 - 2.0 * x_true) + noise
    llr = saturate(2.0 * y / sigma ** 2)

    iters_sum = np.ones(fsz)
    runs = np.ones(fsz, dtype=np.int64)
    if isinstance(decoder, Sc):
        u_hat, x_hat = sc_decode_batch(spec, llr)
    elif isinstance(decoder, Scl):
        u3, x3, _ = scl_decode_batch(spec, llr, decoder.list_size)
        u_hat, x_hat = u3[:, 0], x3[:, 0]
    elif isinstance(decoder, Bp):
        u_hat, x_hat, iters, _ = bp_decode_batch(
            spec, llr, decoder.max_iters, decoder.stopping, decoder.reduce_graph,
            dtype=_BP_MC_DTYPE)
        iters_sum = iters.astype(np.float64)
    elif isinstance(decoder, EnsembleConfig):
        if decoder.resample_per_frame:
            tables = np.stack([
                compile_tables(decoder.sample_automorphisms(
                    spec.m, np.random.default_rng(
                        np.random.SeedSequence(entropy=decoder.seed,
                                               spawn_key=(lo + t,)))))
                for t in range(fsz)])
        else:
            tables = compile_tables(decoder.sample_automorphisms(spec.m))
        x_de, _, iters, valid = decode_branches(spec, llr, tables,
                                                decoder.constituent,
                                                bp_dtype=_BP_MC_DTYPE)
        scores = np.einsum("fcn,fn->fc", 1.0 - 2.0 * x_de.astype(np.float64), y)
        scores[~valid] = -np.inf
        win = np.argmax(scores, axis=1)
        x_hat = x_de[np.arange(fsz), win]
        u_hat = polar_transform(x_hat)
        u_hat[:, spec.frozen] = 0
        if isinstance(decoder.constituent, Bp):
            iters_sum = iters.sum(axis=1).astype(np.float64)
            runs = np.full(fsz, decoder.size, dtype=np.int64)
    else:
        raise TypeError(f"unsupported decoder config {decoder!r}")

    blk = np.any(x_hat != x_true, axis=1)
    bits = np.count_nonzero(u_hat[:, spec.info_indices] != msgs, axis=1)
    return blk, bits.astype(np.int64), iters_sum, runs


def run_mc(spec: CodeSpec, decoder, ch: ChannelConfig, frames: int | None = None,
           target_errors: int | None = 100, all_zero: bool = False,
           workers: int = 1) -> SimRecord:
    """Monte-Carlo block/bit error rates for one decoder at one SNR point.

    Stops at the frame budget or as soon as the cumulative block-error count
    (scanned in frame order) reaches target_errors, whichever comes first;
    the stopping frame is a pure function of the configuration, so records
    are reproducible and independent of `workers`.
    """
    if frames is None and not target_errors:
        raise ValueError("need a frame budget or a block-error target")
    if frames is not None and frames < 1:
        raise ValueError("frame budget must be >= 1")
    if spec.k == 0:
        raise ValueError("cannot simulate a dimension-0 code")
    budget = frames if frames is not None else 1 << 62
    target = target_errors if target_errors else None
    t0 = time.perf_counter()

    tot = {"frames": 0, "blk": 0, "bits": 0, "iters": 0.0, "runs": 0}

    def consume(res) -> bool:
        blk, bits, iters, runs = res
        stop = False
        if target is not None:
            cum = tot["blk"] + np.cumsum(blk)
            hit = np.flatnonzero(cum >= target)
            if hit.size:
                end = int(hit[0]) + 1
                blk, bits, iters, runs = blk[:end], bits[:end], iters[:end], runs[:end]
                stop = True
        tot["frames"] += blk.size
        tot["blk"] += int(np.count_nonzero(blk))
        tot["bits"] += int(bits.sum())
        tot["iters"] += float(iters.sum())
        tot["runs"] += int(runs.sum())
        return stop

    if workers <= 1:
        lo = 0
        while lo < budget:
            hi = min(lo + BATCH_FRAMES, budget)
            if consume(_eval_chunk(spec, decoder, ch, lo, hi, all_zero)):
                break
            lo = hi
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            pending = {}
            next_submit = 0
            next_take = 0
            stopped = False
            while next_take < budget and not stopped:
                while next_submit < budget and len(pending) < workers + 2:
                    hi = min(next_submit + BATCH_FRAMES, budget)
                    pending[next_submit] = pool.submit(
                        _eval_chunk, spec, decoder, ch, next_submit, hi, all_zero)
                    next_submit = hi
                stopped = consume(pending.pop(next_take).result())
                next_take = min(next_take + BATCH_FRAMES, budget)
            for fut in pending.values():
                fut.cancel()

    return SimRecord(frames=tot["frames"], block_errors=tot["blk"],
                     bit_errors=tot["bits"], info_bits=spec.k,
                     avg_iterations=tot["iters"] / max(tot["runs"], 1),
                     wall_seconds=time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# result rows

CSV_HEADER = "code,decoder,subgroup,M,L,ebn0_db,frames,block_errors,bler,ber,avg_iters,seconds"


def decoder_descriptor(decoder) -> tuple[str, str, int, int]:
    """(kind, subgroup, M, L) for result rows; plain decoders use M=0 and
    subgroup '-'; L is the list size, 1 for SC, 0 for BP."""
    if isinstance(decoder, Sc):
        return "sc", "-", 0, 1
    if isinstance(decoder, Scl):
        return "scl", "-", 0, decoder.list_size
    if isinstance(decoder, Bp):
        return "bp", "-", 0, 0
    if isinstance(decoder, EnsembleConfig):
        kind, _, _, lsz = decoder_descriptor(decoder.constituent)
        return kind, decoder.subgroup, decoder.size, lsz
    raise TypeError(f"unsupported decoder config {decoder!r}")


def format_csv_row(spec: CodeSpec, decoder, ch: ChannelConfig, rec: SimRecord) -> str:
    kind, subgroup, msz, lsz = decoder_descriptor(decoder)
    label = f'"{spec.label}"' if "," in spec.label else spec.label
    fields = [label, kind, subgroup, str(msz), str(lsz),
              repr(float(ch.ebn0_db)), str(rec.frames), str(rec.block_errors),
              repr(rec.bler), repr(rec.ber), repr(rec.avg_iterations),
              f"{rec.wall_seconds:.3f}"]
    return ",".join(fields)
