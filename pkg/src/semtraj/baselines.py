"""Reference methods: exhaustive all-pairs scoring and MinHash-LSH candidates.

The exhaustive method is the ground truth for accuracy metrics. The MinHash
baseline reduces each trajectory to the *set* of place types it visits, so
it ignores visiting order and repetitions.
"""

from __future__ import annotations

import numpy as np

from ._parallel import parallel_map
from .encoder import EncodedCorpus, as_corpus
from .model import EmptyResult, EmptyVocabulary, InvalidConfig, SimilarityConfig
from .partitioner import CandidatePairSet, candidate_pair_codes, split_codes
from .similarity import ScoredPairTable, filter_similar, score_rows

MERSENNE_31 = (1 << 31) - 1


def _all_pair_rows(lo: int, hi: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row pairs (i, j), i < j, for ``lo <= i < hi``."""
    counts = n - 1 - np.arange(lo, hi)
    left = np.repeat(np.arange(lo, hi, dtype=np.int64), counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    right = np.arange(len(left), dtype=np.int64) - starts + left + 1
    return left, right


def _row_blocks(n: int, pairs_per_block: int) -> list[tuple[int, int]]:
    blocks = []
    lo = 0
    while lo < n - 1:
        hi, acc = lo, 0
        while hi < n - 1 and (acc == 0 or acc + (n - 1 - hi) <= pairs_per_block):
            acc += n - 1 - hi
            hi += 1
        blocks.append((lo, hi))
        lo = hi
    return blocks


def centralized_all_pairs(corpus: EncodedCorpus, cfg: SimilarityConfig, workers: int = 1,
                          threshold: float | None = None, pairs_per_block: int = 2_000_000) -> ScoredPairTable:
    """Score every unordered pair; N(N-1)/2 rows unless ``threshold`` filters.

    With ``threshold`` set, each block is filtered before it is kept so
    memory stays proportional to the number of similar pairs.
    """
    corpus = as_corpus(corpus)
    n = len(corpus)
    if n < 2:
        raise EmptyResult(f"need at least two trajectories, got {n}")

    def block(span: tuple[int, int]) -> ScoredPairTable:
        left, right = _all_pair_rows(span[0], span[1], n)
        table = score_rows(corpus, left, right, cfg)
        return table if threshold is None else filter_similar(table, threshold)

    blocks = _row_blocks(n, pairs_per_block)
    return ScoredPairTable.concat(parallel_map(block, blocks, workers), cfg.levels)


def centralized_similar(corpus: EncodedCorpus, cfg: SimilarityConfig, workers: int = 1) -> ScoredPairTable:
    return centralized_all_pairs(corpus, cfg, workers, threshold=cfg.threshold)


def minhash_signatures(corpus: EncodedCorpus, num_hashes: int = 128, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """``(signatures, has_types)`` over each row's set of known place types."""
    types = corpus.codes[0]
    owner = np.repeat(np.arange(len(corpus), dtype=np.int64), corpus.lengths)
    known = types >= 0
    if not known.any():
        raise EmptyVocabulary("no trajectory visits a known place type")
    pairs = np.unique(np.column_stack([owner[known], types[known].astype(np.int64)]), axis=0)
    rng = np.random.default_rng(seed)
    a = rng.integers(1, MERSENNE_31, size=num_hashes, dtype=np.int64)
    b = rng.integers(0, MERSENNE_31, size=num_hashes, dtype=np.int64)
    hashed = (pairs[:, 1:2] + 1) * a[None, :] + b[None, :]
    hashed %= MERSENNE_31
    rows, starts = np.unique(pairs[:, 0], return_index=True)
    sig = np.full((len(corpus), num_hashes), MERSENNE_31, dtype=np.int64)
    sig[rows] = np.minimum.reduceat(hashed, starts, axis=0)
    has_types = np.zeros(len(corpus), dtype=bool)
    has_types[rows] = True
    return sig, has_types


def minhash_pair_codes(corpus: EncodedCorpus, num_hashes: int = 128, bands: int = 32, seed: int = 0,
                       workers: int = 1, max_pairs: int | None = None) -> np.ndarray:
    if num_hashes < 1 or bands < 1 or num_hashes % bands:
        raise InvalidConfig(f"bands ({bands}) must divide num_hashes ({num_hashes})")
    corpus = as_corpus(corpus)
    sig, has_types = minhash_signatures(corpus, num_hashes, seed)
    rows = np.flatnonzero(has_types)
    r = num_hashes // bands
    n = len(corpus)
    keys, owners = [], []
    for band in range(bands):
        _, bucket = np.unique(sig[rows, band * r : (band + 1) * r], axis=0, return_inverse=True)
        keys.append(band * n + bucket.ravel().astype(np.int64))
        owners.append(rows)
    return candidate_pair_codes(np.concatenate(keys), np.concatenate(owners), n, workers=workers,
                                max_pairs=max_pairs)


def minhash_candidates(corpus: EncodedCorpus, num_hashes: int = 128, bands: int = 32,
                       seed: int = 0) -> CandidatePairSet:
    corpus = as_corpus(corpus)
    codes = minhash_pair_codes(corpus, num_hashes, bands, seed)
    left, right = split_codes(codes, len(corpus))
    return CandidatePairSet(frozenset(zip(corpus.ids[left].tolist(), corpus.ids[right].tolist())))


def minhash_similar(corpus: EncodedCorpus, cfg: SimilarityConfig, num_hashes: int = 128, bands: int = 32,
                    seed: int = 0, workers: int = 1) -> ScoredPairTable:
    """MinHash candidates scored exactly and filtered at the threshold."""
    corpus = as_corpus(corpus)
    codes = minhash_pair_codes(corpus, num_hashes, bands, seed, workers)
    left, right = split_codes(codes, len(corpus))
    return filter_similar(score_rows(corpus, left, right, cfg, workers), cfg.threshold)


def brp_candidates(*args, **kwargs):
    """Bucketed random projection baseline; not provided.

    It misses almost every similar pair on this task, so it is left out.
    """
    raise NotImplementedError("bucketed random projection baseline is not implemented")
