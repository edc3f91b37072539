"""Categorical document retrieval over a category tree of documents."""
from ._accel import JIT_ENABLED
from .container import ContainerError, load, save
from .corpus import CategoryTree, Corpus, load_corpus, load_tree, parse_tree
from .engine_colored import ColoredEngine, InvalidAlpha
from .engine_wavelet import HeavyPathEngine, ShapedWaveletEngine
from .index import CategoricalIndex, EngineSpec, build_index
from .oracle import OracleIndex, oracle_query
from .query import LevelError, QueryResult, QueryStats

__all__ = [
    "JIT_ENABLED", "ContainerError", "load", "save", "CategoryTree", "Corpus",
    "load_corpus", "load_tree", "parse_tree", "ColoredEngine", "InvalidAlpha",
    "HeavyPathEngine", "ShapedWaveletEngine", "CategoricalIndex", "EngineSpec",
    "build_index", "OracleIndex", "oracle_query", "LevelError", "QueryResult", "QueryStats",
]
