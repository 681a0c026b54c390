import marshmallow
import marshmallow.fields as fields
import marshmallow.validate as validate

from carverify.config import (
    DEFAULT_DIM_IN,
    DEFAULT_SEED,
    DEFAULT_TOL,
    DEFAULT_TRIALS,
    MATRIX_SUITES,
    REPR_GENERATOR_CAP,
    SUITE_NAMES,
)

UINT64_MAX = 2**64 - 1


class Term(marshmallow.Schema):
    class Meta:
        ordered = True

    mask = fields.Integer(required=True, validate=validate.Range(min=0))
    re = fields.Float(required=True)
    im = fields.Float(required=True)


class Element(marshmallow.Schema):
    """Element of the CAR algebra as a list of monomial coefficients.

    ``mask`` encodes a monomial: bit ``j - 1`` set means the generator ``c_j`` occurs.

    """

    class Meta:
        ordered = True

    dim = fields.Integer(required=True, validate=validate.Range(min=1))
    terms = fields.List(fields.Nested(Term()), required=True)

    @marshmallow.validates_schema
    def validate_masks(self, data: dict, many: bool, partial: bool) -> None:
        assert not many and not partial, "Use of `many` and `partial` with schema unsupported."
        limit = 1 << data["dim"]
        for term in data["terms"]:
            if term["mask"] >= limit:
                raise marshmallow.ValidationError(
                    f"Mask `{term['mask']}` out of range for {data['dim']} generators.", "terms"
                )


class SuiteConfig(marshmallow.Schema):
    """Configuration of a verification run.

    ``dim_in`` bounds the dimension sweeps of every suite. Suites which build
    Jordan-Wigner matrices (``remark2``, ``remark4``, ``oracle``) require ``dim_in`` to be
    at most the generator cap of the matrix backend.

    """

    class Meta:
        ordered = True

    dim_in = fields.Integer(load_default=DEFAULT_DIM_IN, validate=validate.Range(min=1))
    trials = fields.Integer(load_default=DEFAULT_TRIALS, validate=validate.Range(min=1))
    seed = fields.Integer(load_default=DEFAULT_SEED, validate=validate.Range(min=0, max=UINT64_MAX))
    tol = fields.Float(load_default=DEFAULT_TOL, validate=validate.Range(min=0))
    format = fields.String(load_default="json", validate=validate.OneOf(["json", "text"]))
    suites = fields.List(
        fields.String(validate=validate.OneOf(SUITE_NAMES)),
        load_default=lambda: list(SUITE_NAMES),
        validate=validate.Length(min=1),
    )
    jobs = fields.Integer(load_default=1, validate=validate.Range(min=1))
    out = fields.String(load_default=None, allow_none=True)

    @marshmallow.validates_schema
    def validate_matrix_cap(self, data: dict, many: bool, partial: bool) -> None:
        assert not many and not partial, "Use of `many` and `partial` with schema unsupported."
        matrix_suites = sorted(MATRIX_SUITES.intersection(data.get("suites", SUITE_NAMES)))
        if matrix_suites and data.get("dim_in", DEFAULT_DIM_IN) > REPR_GENERATOR_CAP:
            raise marshmallow.ValidationError(
                f"Suites `{', '.join(matrix_suites)}` need dim_in <= {REPR_GENERATOR_CAP}.", "dim_in"
            )


class Check(marshmallow.Schema):
    """Outcome of one check at one dimension, aggregated over all trials.

    ``max_error`` is null when a trial raised or produced a non-finite error. ``elapsed_ms``
    and ``median_ns`` are wall-clock measurements and are not reproducible.

    """

    class Meta:
        ordered = True

    suite = fields.String(required=True)
    name = fields.String(required=True)
    dim = fields.Integer(required=True)
    seed = fields.Integer(required=True)
    passed = fields.Boolean(required=True)
    max_error = fields.Float(required=True, allow_none=True)
    elapsed_ms = fields.Float(required=True)
    median_ns = fields.Float()
    error = fields.String()
    witness = fields.Nested(Element())


class Summary(marshmallow.Schema):
    class Meta:
        ordered = True

    total = fields.Integer(required=True, validate=validate.Range(min=0))
    passed = fields.Integer(required=True, validate=validate.Range(min=0))
    failed = fields.Integer(required=True, validate=validate.Range(min=0))

    @marshmallow.validates_schema
    def validate_counts(self, data: dict, many: bool, partial: bool) -> None:
        assert not many and not partial, "Use of `many` and `partial` with schema unsupported."
        if data["failed"] != data["total"] - data["passed"]:
            raise marshmallow.ValidationError("`failed` must equal `total - passed`.", "failed")


class Report(marshmallow.Schema):
    class Meta:
        ordered = True

    checks = fields.List(fields.Nested(Check()), required=True)
    summary = fields.Nested(Summary(), required=True)

    @marshmallow.validates_schema
    def validate_summary(self, data: dict, many: bool, partial: bool) -> None:
        assert not many and not partial, "Use of `many` and `partial` with schema unsupported."
        passed = sum(check["passed"] for check in data["checks"])
        if data["summary"]["total"] != len(data["checks"]) or data["summary"]["passed"] != passed:
            raise marshmallow.ValidationError("Summary does not match the check records.", "summary")
