"""Dense word embeddings with an ordered vocabulary.

Tables are immutable after construction (the vector array is marked
read-only), so they can be shared freely across evaluation workers.
"""

from __future__ import annotations

import warnings

import numpy as np

UNIT_NORM_TOL = 1e-12


class EmbeddingTable:
    """Vocabulary plus dense D-dimensional word vectors, one row per word.

    Words map to unique row indices in insertion order. Vectors are stored
    as float64 because the subspace/angle computations downstream are
    sensitive near zero angles.
    """

    def __init__(self, words: list[str], vectors: np.ndarray):
        vectors = np.ascontiguousarray(vectors, dtype=np.float64)
        if vectors.ndim != 2:
            raise ValueError(f"vectors must be a 2-d array, got shape {vectors.shape}")
        if len(words) != vectors.shape[0]:
            raise ValueError(
                f"{len(words)} words but {vectors.shape[0]} vector rows"
            )
        if vectors.shape[1] < 1:
            raise ValueError("embedding dimension must be at least 1")
        index: dict[str, int] = {}
        for i, w in enumerate(words):
            if w in index:
                raise ValueError(f"duplicate word {w!r}")
            index[w] = i
        self.words = list(words)
        self.index = index
        self.vectors = vectors
        self.vectors.setflags(write=False)
        self._lower_index: dict[str, int] | None = None
        self._lower_words: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def lookup(self, word: str) -> np.ndarray | None:
        """Return the stored row for ``word``, or None if absent."""
        i = self.index.get(word)
        return None if i is None else self.vectors[i]

    def resolve(self, word: str) -> int | None:
        """Row index for ``word``: exact match first, then case-insensitive.

        Case-insensitive fallback picks the first matching vocabulary entry,
        which keeps resolution deterministic.
        """
        i = self.index.get(word)
        if i is not None:
            return i
        if self._lower_index is None:
            lower: dict[str, int] = {}
            for j, w in enumerate(self.words):
                lower.setdefault(w.lower(), j)
            self._lower_index = lower
        return self._lower_index.get(word.lower())

    def lowercase_words(self) -> np.ndarray:
        """Lowercased vocabulary as an object array (cached)."""
        if self._lower_words is None:
            self._lower_words = np.asarray([w.lower() for w in self.words], dtype=object)
        return self._lower_words

    def stack_rows(self, words: list[str]) -> np.ndarray:
        """Stack lookup results for ``words`` into an n x D matrix.

        Raises ValueError naming the first word missing from the vocabulary.
        """
        rows = np.empty((len(words), self.dim))
        for k, w in enumerate(words):
            i = self.index.get(w)
            if i is None:
                raise ValueError(f"word not in vocabulary: {w!r}")
            rows[k] = self.vectors[i]
        return rows

    def normalized(self) -> "EmbeddingTable":
        """Copy of the table with unit-norm rows.

        Rows whose norm is already within 1e-12 of 1 are left bit-identical,
        which makes normalization exactly idempotent. Zero rows are rejected;
        drop them first (the text loader already does).
        """
        norms = np.linalg.norm(self.vectors, axis=1)
        if np.any(norms == 0.0):
            bad = self.words[int(np.argmax(norms == 0.0))]
            raise ValueError(f"cannot normalize zero vector for word {bad!r}")
        out = self.vectors.copy()
        stale = np.abs(norms - 1.0) > UNIT_NORM_TOL
        out[stale] /= norms[stale, None]
        return EmbeddingTable(self.words, out)


def load_text_embeddings(path: str, normalize: bool = False) -> EmbeddingTable:
    """Load embeddings from the text format ``<|V|> <D>`` + one word per line.

    Policy on dirty input: duplicate words keep the first occurrence (warn),
    all-zero vectors are dropped (warn), and a count that disagrees with the
    header is warned about. Structural problems (bad header, wrong number of
    values on a line) raise ValueError with the offending line number.
    """
    words: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        header = f.readline()
        parts = header.split()
        if len(parts) != 2:
            raise ValueError(f"{path}: line 1: malformed header {header.strip()!r}")
        try:
            declared, dim = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"{path}: line 1: malformed header {header.strip()!r}") from None
        if declared < 0 or dim < 1:
            raise ValueError(f"{path}: line 1: malformed header {header.strip()!r}")
        for lineno, line in enumerate(f, start=2):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != dim + 1:
                raise ValueError(
                    f"{path}: line {lineno}: expected {dim} values for word "
                    f"{fields[0]!r}, got {len(fields) - 1}"
                )
            word = fields[0]
            try:
                vec = np.array([float(x) for x in fields[1:]])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric value") from None
            if word in seen:
                warnings.warn(f"{path}: line {lineno}: duplicate word {word!r}, keeping first")
                continue
            if not np.any(vec):
                warnings.warn(f"{path}: line {lineno}: dropping zero vector for {word!r}")
                continue
            seen.add(word)
            words.append(word)
            rows.append(vec)
    if not words:
        raise ValueError(f"{path}: no usable embedding rows")
    if len(words) != declared:
        warnings.warn(f"{path}: header declares {declared} words, loaded {len(words)}")
    table = EmbeddingTable(words, np.vstack(rows))
    return table.normalized() if normalize else table


def save_text_embeddings(table: EmbeddingTable, path: str) -> None:
    """Write the text format with 17 significant digits (float64 round-trip)."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{len(table)} {table.dim}\n")
        for word, row in zip(table.words, table.vectors):
            f.write(word + " " + " ".join(format(v, ".17g") for v in row) + "\n")
