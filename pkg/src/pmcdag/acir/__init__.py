"""Arithmetic circuits over rational functions of the model parameters."""
from .store import (ADD, CONST, INV, KIND_NAMES, MUL, NEG, PARAM, DagStore,
                    pack_binary, pack_leaf, pack_unary, to_rational, unpack)
from .interval import Interval
from .evaluate import (eval_exact, eval_exact_many, eval_float,
                       eval_float_batch, eval_interval, eval_interval_batch,
                       interval_columns)
from .sz import (PRIME, apply_substitution, signatures, simplify,
                 sz_canonicalize)
from .codec import MAGIC, decode, encode, read_acir, write_acir

__all__ = [
    "ADD", "CONST", "INV", "KIND_NAMES", "MUL", "NEG", "PARAM", "DagStore",
    "Interval", "MAGIC", "PRIME", "apply_substitution", "decode", "encode",
    "eval_exact", "eval_exact_many", "eval_float", "eval_float_batch",
    "eval_interval", "eval_interval_batch", "interval_columns", "pack_binary",
    "pack_leaf", "pack_unary", "read_acir", "signatures", "simplify",
    "sz_canonicalize", "to_rational", "unpack", "write_acir",
]
