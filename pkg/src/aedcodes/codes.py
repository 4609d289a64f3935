"""Reed-Muller and decreasing-monomial polar codes.

A code of length ``N = 2**m`` is described by its frozen-bit indicator: row
``i`` of the Hadamard power ``G_N = [[1,0],[1,1]]^{kron m}`` is a generator
row iff position ``i`` is not frozen.  Codewords are evaluations of
multilinear polynomials over GF(2); bit index ``i`` corresponds to the
evaluation point ``z`` with ``z_j = 1 - i_j``, so the monomial attached to
row ``i`` is the product of the variables ``z_j`` with ``i_j = 0``
(bitmask ``~i``).  All modules in this package share this single bit-order
convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

M_MAX = 20          # hard cap on log-length: N <= 2**20
CODEBOOK_K_MAX = 24  # hard cap on exhaustive codebook enumeration


class CapacityError(RuntimeError):
    """An operation would exceed a hard size limit."""


def _popcount(x):
    return np.bitwise_count(np.asarray(x, dtype=np.uint64)).astype(np.int64)


@dataclass(frozen=True)
class Monomial:
    """A squarefree monomial in m binary variables, stored as a bitmask.

    Bit ``j`` of ``mask`` is set iff the variable ``z_j`` appears.  The
    constant monomial 1 has mask 0.
    """

    mask: int
    m: int

    def __post_init__(self):
        if not 0 <= self.mask < (1 << self.m):
            raise ValueError(f"mask {self.mask:#x} out of range for m={self.m}")

    @property
    def degree(self) -> int:
        return bin(self.mask).count("1")

    @property
    def variables(self) -> tuple[int, ...]:
        """Ascending indices of the variables in the monomial."""
        return tuple(j for j in range(self.m) if (self.mask >> j) & 1)

    def __str__(self):
        if self.mask == 0:
            return "1"
        return "*".join(f"z{j}" for j in self.variables)


@dataclass(frozen=True)
class MonomialSet:
    """A duplicate-free set of monomials in m variables (the code's I-set)."""

    m: int
    masks: frozenset[int]

    def __post_init__(self):
        bad = [x for x in self.masks if not 0 <= x < (1 << self.m)]
        if bad:
            raise ValueError(f"masks out of range for m={self.m}: {bad[:4]}")

    def __len__(self):
        return len(self.masks)

    def __contains__(self, mask: int) -> bool:
        return mask in self.masks

    def monomials(self) -> list[Monomial]:
        return [Monomial(x, self.m) for x in sorted(self.masks)]


def index_to_monomial_mask(i: int, m: int) -> int:
    """Map generator-row index i to its monomial mask (bit j set iff i_j = 0)."""
    return ~i & ((1 << m) - 1)


def monomial_leq(f: int, g: int, m: int) -> bool:
    """Partial order f <= g on monomial masks.

    For equal degrees, the ascending variable-index vectors must compare
    elementwise.  For deg(f) < deg(g) the requirement is a degree-matching
    divisor g* of g with f <= g*; taking the largest deg(f) variables of g
    is sufficient, so the test reduces to comparing f's variables against
    the top slice of g's.
    """
    fv = [j for j in range(m) if (f >> j) & 1]
    gv = [j for j in range(m) if (g >> j) & 1]
    if len(fv) > len(gv):
        return False
    off = len(gv) - len(fv)
    return all(a <= gv[off + i] for i, a in enumerate(fv))


class CodeSpec:
    """Length, frozen pattern and generator of a monomial (RM/polar) code.

    Instances are immutable after construction (arrays are write-protected)
    and safe to share across workers.
    """

    def __init__(self, m: int, frozen, label: str | None = None):
        if not 0 <= m <= M_MAX:
            raise ValueError(f"m={m} outside [0, {M_MAX}]")
        frozen = np.asarray(frozen, dtype=bool).copy()
        if frozen.shape != (1 << m,):
            raise ValueError(f"frozen vector must have length {1 << m}, got {frozen.shape}")
        frozen.setflags(write=False)
        self.m = m
        self.n = 1 << m
        self.frozen = frozen
        self.info_indices = np.flatnonzero(~frozen)
        self.info_indices.setflags(write=False)
        self.k = int(self.info_indices.size)
        self.label = label if label is not None else f"code(m={m},k={self.k})"
        self._generator = None
        self._parity = None

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def monomials(self) -> MonomialSet:
        return MonomialSet(self.m, frozenset(index_to_monomial_mask(int(i), self.m)
                                             for i in self.info_indices))

    @property
    def generator(self) -> np.ndarray:
        """k x N generator: rows of G_N at the info indices, increasing index.

        G_N[i, j] = 1 iff the support of j is contained in the support of i.
        """
        if self._generator is None:
            rows = self.info_indices[:, None]
            cols = np.arange(self.n)[None, :]
            g = ((cols & ~rows) == 0).astype(np.uint8)
            g.setflags(write=False)
            self._generator = g
        return self._generator

    @property
    def parity(self) -> np.ndarray:
        """(N-k) x N parity-check matrix from Gaussian elimination of the generator."""
        if self._parity is None:
            h = _nullspace_gf2(self.generator)
            h.setflags(write=False)
            self._parity = h
        return self._parity

    def __repr__(self):
        return f"CodeSpec({self.label}, N={self.n}, k={self.k})"

    def __eq__(self, other):
        return (isinstance(other, CodeSpec) and self.m == other.m
                and bool(np.array_equal(self.frozen, other.frozen)))

    def __hash__(self):
        return hash((self.m, self.frozen.tobytes()))


def rm_code(r: int, m: int) -> CodeSpec:
    """RM(r, m): info positions are the indices of Hamming weight >= m - r."""
    if not 0 <= m <= M_MAX:
        raise ValueError(f"m={m} outside [0, {M_MAX}]")
    if not 0 <= r <= m:
        raise ValueError(f"order r={r} outside [0, m={m}]")
    w = _popcount(np.arange(1 << m))
    return CodeSpec(m, w < (m - r), label=f"RM({r},{m})")


def polar_code(m: int, frozen) -> CodeSpec:
    """Code with an explicitly given frozen indicator vector of length 2**m."""
    frozen = np.asarray(frozen, dtype=bool)
    if frozen.shape != (1 << m,):
        raise ValueError(f"frozen vector must have length {1 << m}, got {frozen.shape}")
    k = int(np.count_nonzero(~frozen))
    return CodeSpec(m, frozen, label=f"polar(m={m},k={k})")


def is_decreasing(spec: CodeSpec) -> bool:
    """True iff the monomial set is downward closed under the partial order.

    Checks closure under the covering moves that generate the order: deleting
    one variable, and replacing one variable by a smaller unused one.
    """
    members = spec.monomials.masks
    m = spec.m
    for g in members:
        vs = [j for j in range(m) if (g >> j) & 1]
        for j in vs:
            if (g & ~(1 << j)) not in members:
                return False
            for jp in range(j):
                if not (g >> jp) & 1:
                    if ((g & ~(1 << j)) | (1 << jp)) not in members:
                        return False
    return True


def polar_transform(bits: np.ndarray) -> np.ndarray:
    """Apply G_N = F^{kron m} to the last axis over GF(2).

    The transform is an involution, so it both encodes (u -> u G_N) and
    inverts (x -> x G_N = u).
    """
    x = np.ascontiguousarray(bits, dtype=np.uint8).copy()
    n = x.shape[-1]
    if n & (n - 1):
        raise ValueError(f"length {n} is not a power of two")
    m = n.bit_length() - 1
    v = x.reshape(-1, n)
    for s in range(m):
        blk = v.reshape(v.shape[0], n >> (s + 1), 2, 1 << s)
        blk[:, :, 0, :] ^= blk[:, :, 1, :]
    return x


def encode(spec: CodeSpec, u) -> np.ndarray:
    """Encode message(s) u of length k into codeword(s) x = u G of length N.

    Message coordinate i multiplies the generator row with the i-th smallest
    info index.  Accepts a single message or a batch with k on the last axis.
    """
    u = np.asarray(u, dtype=np.uint8)
    if u.shape[-1] != spec.k:
        raise ValueError(f"message length {u.shape[-1]} != k={spec.k}")
    full = np.zeros(u.shape[:-1] + (spec.n,), dtype=np.uint8)
    full[..., spec.info_indices] = u
    return polar_transform(full)


def in_code(spec: CodeSpec, x) -> bool:
    """Membership test via the parity-check matrix (H x^T = 0)."""
    x = np.asarray(x, dtype=np.uint8)
    if x.shape != (spec.n,):
        raise ValueError(f"word length {x.shape} != N={spec.n}")
    if spec.k == spec.n:
        return True
    return not np.any((spec.parity @ x) & 1)


def split_subcodes(spec: CodeSpec) -> tuple[CodeSpec, CodeSpec]:
    """Halve the code: upper subcode from the first half of the frozen
    vector, lower subcode from the second half (both of length 2**(m-1))."""
    if spec.m < 1:
        raise ValueError("cannot split a length-1 code")
    h = spec.n // 2
    return (CodeSpec(spec.m - 1, spec.frozen[:h]),
            CodeSpec(spec.m - 1, spec.frozen[h:]))


def pointwise_product_in_lower(spec: CodeSpec, xu, xrm) -> bool:
    """Test whether (xu * xrm) componentwise lies in the lower subcode.

    xu must belong to the upper subcode of `spec` and xrm to RM(1, m-1);
    for decreasing monomial codes the product is always a lower-subcode
    member, and this function is the executable check of that fact.
    """
    upper, lower = split_subcodes(spec)
    xu = np.asarray(xu, dtype=np.uint8)
    xrm = np.asarray(xrm, dtype=np.uint8)
    if xu.shape != (upper.n,) or xrm.shape != (upper.n,):
        raise ValueError(f"operands must have length {upper.n}")
    if not in_code(upper, xu):
        raise ValueError("xu is not a codeword of the upper subcode")
    if not in_code(rm_code(min(1, spec.m - 1), spec.m - 1), xrm):
        raise ValueError("xrm is not a codeword of RM(1, m-1)")
    return in_code(lower, xu & xrm)


def enumerate_codebook(spec: CodeSpec) -> np.ndarray:
    """All 2**k codewords as a (2**k, N) array, message counting order.

    Message number c encodes the message with coordinate i = bit i of c.
    Guarded by CODEBOOK_K_MAX since the output grows as 2**k.
    """
    if spec.k > CODEBOOK_K_MAX:
        raise CapacityError(f"k={spec.k} exceeds codebook cap {CODEBOOK_K_MAX}")
    count = 1 << spec.k
    out = np.empty((count, spec.n), dtype=np.uint8)
    chunk = 1 << 14
    for lo in range(0, count, chunk):
        hi = min(lo + chunk, count)
        nums = np.arange(lo, hi, dtype=np.uint64)[:, None]
        msgs = ((nums >> np.arange(spec.k, dtype=np.uint64)[None, :]) & 1).astype(np.uint8)
        out[lo:hi] = encode(spec, msgs)
    return out


def read_frozen_file(path) -> CodeSpec:
    """Load a frozen set from text: line 1 "m=<int>", line 2 an N-char
    string of '0' (info) / '1' (frozen) in index order."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh.read().splitlines() if ln.strip()]
    if len(lines) < 2 or not lines[0].startswith("m="):
        raise ValueError(f"{path}: expected 'm=<int>' then an indicator line")
    m = int(lines[0][2:])
    pattern = lines[1]
    if len(pattern) != (1 << m) or set(pattern) - {"0", "1"}:
        raise ValueError(f"{path}: indicator line must be {1 << m} chars of 0/1")
    frozen = np.frombuffer(pattern.encode("ascii"), dtype=np.uint8) == ord("1")
    return polar_code(m, frozen)


def write_frozen_file(path, spec: CodeSpec) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"m={spec.m}\n")
        fh.write("".join("1" if f else "0" for f in spec.frozen) + "\n")


def _nullspace_gf2(g: np.ndarray) -> np.ndarray:
    """Basis of the right nullspace of a GF(2) matrix, one row per vector."""
    a = np.array(g, dtype=np.uint8) & 1
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hit = np.flatnonzero(a[r:, c])
        if hit.size == 0:
            continue
        p = r + hit[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        elim = np.flatnonzero(a[:, c])
        elim = elim[elim != r]
        a[elim] ^= a[r]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    h = np.zeros((len(free), cols), dtype=np.uint8)
    for i, c in enumerate(free):
        h[i, c] = 1
        for rr, pc in enumerate(pivots):
            h[i, pc] = a[rr, c]
    return h
