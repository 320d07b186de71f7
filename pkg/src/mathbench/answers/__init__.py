from .tree import Expr
from .parser import parse, ParseError, MalformedAnswer, ConstraintViolation
from .canonical import canonical
from .evaluate import numeric_probe, evaluate, EvalError, NonEvaluable
from .equivalence import (
    ExtractionResult,
    Verdict,
    check_answer,
    equivalent,
    extract_final_answer,
)

__all__ = [
    "Expr", "parse", "ParseError", "MalformedAnswer", "ConstraintViolation",
    "canonical", "numeric_probe", "evaluate", "EvalError", "NonEvaluable",
    "ExtractionResult", "Verdict", "check_answer", "equivalent",
    "extract_final_answer",
]
