"""Offline LTL evaluation over bitmap backends.

A trace of Boolean events is turned into one ground bitmap per variable;
LTL formulas are then evaluated bottom-up by bitmap manipulation, over an
uncompressed backend and two compressed ones (run-length and two-level
containers).  See the README for the CLI and the benchmark harness.
"""

from .bench import (BenchConfig, BenchRecord, CompressionRecord,
                    compression_report, parse_bench_csv, run_bench, write_csv)
from .bitmaps import (BACKENDS, Bitmap, LengthMismatchError, RawBitmap,
                      RleBitmap, RoaringBitmap, from_string, make_empty)
from .corpus import FormulaCorpus, corpus
from .evaluator import (EvalResult, GroundEnv, evaluate,
                        ground_env_from_columns, until_scan, verdict)
from .formulas import (And, Atom, Finally, Formula, FormulaSyntaxError,
                       Globally, Implies, Next, Not, Or, Until, depth, parse,
                       render, size)
from .oracle import UnboundAtomError, empty_trace_verdict, oracle_bits
from .traces import (Trace, TraceFormatError, TraceGenSpec,
                     build_ground_bitmaps, generate_random_trace, load_trace,
                     slice_trace, write_trace)

__version__ = "0.1.0"

__all__ = [
    "BACKENDS", "BenchConfig", "BenchRecord", "Bitmap", "CompressionRecord",
    "EvalResult", "Formula", "FormulaCorpus", "FormulaSyntaxError",
    "GroundEnv", "LengthMismatchError", "RawBitmap", "RleBitmap",
    "RoaringBitmap", "Trace", "TraceFormatError", "TraceGenSpec",
    "UnboundAtomError", "And", "Atom", "Finally", "Globally", "Implies",
    "Next", "Not", "Or", "Until", "build_ground_bitmaps",
    "compression_report", "corpus", "depth", "empty_trace_verdict",
    "evaluate", "from_string", "generate_random_trace",
    "ground_env_from_columns", "load_trace", "make_empty", "oracle_bits",
    "parse", "parse_bench_csv", "render", "run_bench", "size", "slice_trace",
    "until_scan", "verdict", "write_csv", "write_trace",
]
