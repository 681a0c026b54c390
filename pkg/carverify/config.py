"""Tolerances, size caps and suite defaults.

Values here are module-level constants. Functions which use them accept a keyword
argument overriding the constant for a single call.
"""

# structural checks (orthonormality, unitarity of constructed elements)
STRUCTURAL_TOL = 1e-12
# derived numerical checks (kernels, residuals, suite default)
DERIVED_TOL = 1e-10
# coefficients with magnitude at or below this are dropped from an AlgElement
PRUNE_TOL = 1e-14

# number of Majorana generators the dense Jordan-Wigner backend accepts by default
REPR_GENERATOR_CAP = 12
# no call may raise the cap beyond this
REPR_HARD_CAP = 16
# the monomial bitmask must fit in a machine word; the harness never exceeds 16
ALGEBRA_GENERATOR_CAP = 63
BENCH_DIM_CAP = 16
# `bench_multiply` compares against the matrix oracle up to this many generators
BENCH_ORACLE_DIM = 8

# sparse products switch to the vectorized kernel when the larger operand has more terms
# than max(SPARSE_TERM_LIMIT, 2**m >> DENSE_SHIFT)
SPARSE_TERM_LIMIT = 64
DENSE_SHIFT = 7

# SuiteConfig defaults
DEFAULT_DIM_IN = 4
DEFAULT_TRIALS = 100
DEFAULT_SEED = 42
DEFAULT_TOL = DERIVED_TOL
SUITE_NAMES = ("proposition", "remark1", "remark2", "remark3", "remark4", "oracle")
# suites which build Jordan-Wigner matrices; their dimensions are bounded by REPR_GENERATOR_CAP
MATRIX_SUITES = frozenset({"remark2", "remark4", "oracle"})

# upper ends of the dimension sweeps, each further bounded by `dim_in`
PROPOSITION_MAX_DIM = 8
PROPOSITION_ORACLE_MAX_DIM = 6
REMARK1_MAX_DIM = 6
REMARK2_MAX_DIM = 6
REMARK3_MAX_DIM = 6
REMARK4_MAX_CODOMAIN = 12
ORACLE_MAX_DIM = 8
# the full-basis identity for the conditional expectation is checked on this many trials
BASIS_TRIALS = 3
