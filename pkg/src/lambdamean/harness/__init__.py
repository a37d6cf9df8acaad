"""Random operator generation, the verification suite and the worked-example report."""
from .checks import ANCHORS, Check, VerifyReport
from .examples import EXAMPLE_ANCHORS, paper_examples
from .generate import KINDS, KindUnsatisfied, OperatorSpec, corpus_specs, generate
from .suite import DEFAULT_GRID, SuiteOptions, run_corpus, verify_suite

__all__ = ["ANCHORS", "EXAMPLE_ANCHORS", "Check", "VerifyReport", "KINDS", "KindUnsatisfied",
           "OperatorSpec", "corpus_specs", "generate", "DEFAULT_GRID", "SuiteOptions",
           "paper_examples", "run_corpus", "verify_suite"]
