"""shapegen: asymptotically uniform random signals from shape expressions.

The pipeline has two independent stages: a Boltzmann sampler draws a
shape word from the spec's regular expression (words of equal length
are equiprobable, mean length is tunable), and a hit-and-run Markov
chain draws a parameter valuation from the constraint set (uniform in
the limit).  Rendering the pair gives a piecewise signal.
"""

from .sexpr import (ParseError, ShapeExpr, parse_spec, parse_regex,
                    parse_constraint, print_spec)
from .lang import (AmbiguityReport, DisambiguationError, check_ambiguity,
                   disambiguate, matches, enumerate_words,
                   count_words_by_length, count_derivations)
from .genfun import (Polynomial, RationalFunction, TunedParams, TuneError,
                     generating_function, taylor_coefficients,
                     convergence_radius, mean_length_function, tune_z,
                     tuning_polynomial)
from .words import (BoltzmannOracle, ShapeWord, WordTooLongError,
                    build_oracle, sample_word, word_probability)
from .constraints import (CompileError, ParamSpace, compile_constraint,
                          compile_spec, DEFAULT_EPS)
from .hitrun import (ChainError, ChainState, ChainStats, RejectionBudgetError,
                     SamplerConfig, VARIANTS, hr_step, line_box_intersection,
                     rejection_sample, run_chain)
from .pso import InitializationError, PsoConfig, find_initial, pso_iterate
from .signals import (RenderError, Signal, atom_value, boundary_jumps,
                      project_continuity, render, to_csv, to_json)
from .stats import InsufficientDataError, WordStats, same_length_test, word_stats
from .bench import (BenchResult, RingSpec, ball_volume, bench_to_csv,
                    bench_to_json, make_ring_space, ring_acceptance_ratio,
                    run_bench, uniformity_report)

__version__ = "0.1.0"
