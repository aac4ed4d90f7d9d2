"""Declarative language for quantum functions.

A function source (conventionally a ``.qf`` file) declares integer input
parameters, a parameterized circuit template, and a post-processing pipeline::

    fn qrng template qiskit {
        param n : int min=1 max=24 default=4
        circuit {
            qubits n
            repeat q in 0..n { h q }
            measure all
        }
        post top | to_int
    }

The three sections mirror the classic handler split of pre-processing,
circuit generation, and post-processing, but as a closed language: sources
are statically checkable, sandboxed, and expand deterministically into the
circuit IR.  See ``docs/dsl.md`` for the grammar.
"""

from .ast import (
    FunctionDef,
    ParamDecl,
    PostKind,
    PostStep,
    TemplateBlock,
    TEMPLATE_TAGS,
)
from .errors import (
    EvalError,
    InputError,
    MissingParam,
    ParseError,
    PipelineTypeError,
    RangeViolation,
    StaticError,
    TypeViolation,
)
from .evaluator import PostResult, instantiate, postprocess, preprocess
from .parser import parse

__all__ = [
    "FunctionDef",
    "ParamDecl",
    "PostKind",
    "PostStep",
    "TemplateBlock",
    "TEMPLATE_TAGS",
    "parse",
    "preprocess",
    "instantiate",
    "postprocess",
    "PostResult",
    "ParseError",
    "StaticError",
    "EvalError",
    "InputError",
    "MissingParam",
    "RangeViolation",
    "TypeViolation",
    "PipelineTypeError",
]
