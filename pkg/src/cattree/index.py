"""One object holding the shared text structures and any number of engines."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import CategoryTree, Corpus
from .engine_colored import ColoredEngine, InvalidAlpha, default_alpha
from .engine_wavelet import HeavyPathEngine, ShapedWaveletEngine
from .query import Engine, QueryResult, QueryStats
from .text_index import DocumentArray, SuffixIndex, document_array
from .topology import LevelAncestorIndex

ENGINE_KINDS = ("colored", "wavelet", "heavy")


@dataclass(frozen=True)
class EngineSpec:
    kind: str
    alpha: int | None = None  # None: 1 for stored, ceil(h / log2 sigma) for compact
    doc_array: str = "stored"

    def __post_init__(self):
        if self.kind not in ENGINE_KINDS:
            raise ValueError(f"unknown engine {self.kind!r}; expected one of {ENGINE_KINDS}")
        if self.alpha is not None and self.alpha < 1:
            raise InvalidAlpha(f"alpha must be >= 1, got {self.alpha}")
        if self.doc_array not in ("stored", "compact"):
            raise ValueError(f"unknown document array mode {self.doc_array!r}")


def verification_specs(alpha: int = 4) -> list[EngineSpec]:
    """Every engine configuration the verifier and the acceptance suite exercise."""
    return [
        EngineSpec("colored", 1, "stored"),
        EngineSpec("colored", alpha, "stored"),
        EngineSpec("colored", None, "compact"),
        EngineSpec("wavelet"),
        EngineSpec("heavy"),
    ]


class CategoricalIndex:
    def __init__(self, tree: CategoryTree, text: SuffixIndex, da: DocumentArray,
                 engines: dict[str, Engine], meta: dict):
        self.tree = tree
        self.text = text
        self.da = da
        self.laq = next((e.laq for e in engines.values()), None) or LevelAncestorIndex(tree)
        self.engines = engines
        self.meta = meta

    @classmethod
    def build(cls, corpus: Corpus, tree: CategoryTree, specs=None,
              sample_rate: int | None = None) -> CategoricalIndex:
        if tree.D != corpus.D:
            raise ValueError(f"tree maps {tree.D} documents, corpus has {corpus.D}")
        specs = [EngineSpec("colored")] if specs is None else list(specs)
        text = SuffixIndex(corpus, sample_rate)
        a = document_array(corpus, text)
        stored = any(s.kind == "colored" and s.doc_array == "stored" for s in specs)
        da = DocumentArray(corpus, text, "stored" if stored else "compact", values=a)
        laq = LevelAncestorIndex(tree)
        engines: dict[str, Engine] = {}
        for spec in specs:
            if spec.kind == "colored":
                alpha = spec.alpha
                if alpha is None:
                    alpha = 1 if spec.doc_array == "stored" else default_alpha(tree.height, corpus.sigma)
                view = da if spec.doc_array == da.mode else da.view(spec.doc_array)
                eng = ColoredEngine.build(text, view, a, tree, laq, alpha)
            elif spec.kind == "wavelet":
                eng = ShapedWaveletEngine.build(text, a, tree, laq)
            else:
                eng = HeavyPathEngine.build(text, a, tree, laq)
            engines.setdefault(eng.tag, eng)
        text.sa = None
        meta = {
            "D": corpus.D,
            "n": corpus.n,
            "n_prime": corpus.n_prime,
            "sigma": corpus.sigma,
            "height": tree.height,
            "nodes": tree.node_count,
            "entropy0": corpus.entropy0(),
        }
        return cls(tree, text, da, engines, meta)

    @property
    def height(self) -> int:
        return self.tree.height

    def engine(self, name: str | None = None) -> Engine:
        if name is None:
            return next(iter(self.engines.values()))
        if name in self.engines:
            return self.engines[name]
        for tag, eng in self.engines.items():
            if eng.kind == name:
                return eng
        raise KeyError(f"no engine {name!r} in index (have {', '.join(self.engines)})")

    def query(self, pattern, level: int, engine: str | None = None,
              stats: QueryStats | None = None) -> QueryResult:
        return self.engine(engine).query(pattern, level, stats=stats)

    def count(self, pattern) -> int:
        return len(self.text.count(pattern))

    def space_report(self) -> list[tuple[str, int, str, int]]:
        """(structure, measured bits, reference formula, reference bits) rows."""
        m = self.meta
        n, D, sigma, h = m["n"], m["D"], m["sigma"], m["height"]
        log_sigma = max(1, math.ceil(math.log2(max(2, sigma))))
        log_d = max(1, math.ceil(math.log2(max(2, D))))
        rows = []
        text_bits = sum(self.text.space_bits().values())
        rows.append(("text index (BWT + sampled SA)", text_bits, "n*ceil(log sigma)", n * log_sigma))
        rows.append(("text index, compressed reference", text_bits, "n*H0", int(n * m["entropy0"])))
        for name, bits in self.da.space_bits().items():
            if name == "document_array":
                rows.append(("document array", bits, "n*ceil(log D)", n * log_d))
            else:
                rows.append((name, bits, "D separators / n' bits", m["n_prime"]))
        rows.append(("level ancestor (binary lifting)", self.laq.space_bits(), "2*Delta", 2 * m["nodes"]))
        for tag, eng in self.engines.items():
            sb = eng.space_bits()
            if eng.kind == "colored":
                if eng.alpha == 1:
                    label, ref = "2*n per level (h levels)", 2 * n * h
                else:
                    label, ref = "n*h/alpha", n * h // eng.alpha
                rows.append((f"{tag}: reporters", sb["reporters"], label, ref))
            elif eng.kind == "wavelet":
                rows.append((f"{tag}: bitvectors", sb["wavelet_bitvectors"], "n*h*log D", n * h * log_d))
                rows.append((f"{tag}: node tables", sb["wavelet_node_tables"] + sb["shape_depths"],
                             "O(D log n)", D * max(1, math.ceil(math.log2(max(2, n))))))
            else:
                rows.append((f"{tag}: path bitvectors", sb["path_wavelet_bitvectors"], "n*log^2 D",
                             n * log_d * log_d))
                rows.append((f"{tag}: path tables", sb["path_wavelet_node_tables"] + sb["path_tables"],
                             "O(Delta)", m["nodes"]))
        return rows

    def total_bits(self) -> int:
        bits = sum(self.text.space_bits().values()) + sum(self.da.space_bits().values())
        bits += self.laq.space_bits()
        for eng in self.engines.values():
            bits += sum(v for k, v in eng.space_bits().items() if k != "reporter_cells")
        return int(bits)

    # serialization state -------------------------------------------------

    def state(self):
        engines = {}
        for tag, eng in self.engines.items():
            st = {"kind": eng.kind, **eng.state()}
            if eng.kind == "colored":
                st["doc_array"] = eng.da.mode
            engines[tag] = st
        return {
            "meta": dict(self.meta),
            "tree": self.tree.state(),
            "text": self.text.state(),
            "da": self.da.state(),
            "engines": engines,
        }

    @classmethod
    def from_state(cls, st) -> CategoricalIndex:
        tree = CategoryTree.from_state(st["tree"])
        text = SuffixIndex.from_state(st["text"])
        da = DocumentArray.from_state(st["da"], text)
        laq = LevelAncestorIndex(tree)
        engines: dict[str, Engine] = {}
        for tag, es in st["engines"].items():
            kind = es["kind"]
            if kind == "colored":
                mode = es["doc_array"]
                view = da if mode == da.mode else da.view(mode)
                engines[tag] = ColoredEngine.from_state(es, text, view, laq)
            elif kind == "wavelet":
                engines[tag] = ShapedWaveletEngine.from_state(es, text, laq)
            elif kind == "heavy":
                engines[tag] = HeavyPathEngine.from_state(es, text, laq)
            else:
                raise ValueError(f"unknown engine kind {kind!r}")
        meta = {k: (float(v) if k == "entropy0" else int(v)) for k, v in st["meta"].items()}
        return cls(tree, text, da, engines, meta)


def build_index(corpus: Corpus, tree: CategoryTree, specs=None, sample_rate=None) -> CategoricalIndex:
    return CategoricalIndex.build(corpus, tree, specs, sample_rate)


def document_array_values(idx: CategoricalIndex) -> np.ndarray:
    return idx.da.to_numpy()
