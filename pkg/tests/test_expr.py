"""Parser, evaluator, derivative and Cauchy-Riemann checks."""

import cmath
import math
import random

import pytest

from isomin.expr import (
    BinOp,
    Call,
    EvalError,
    Lit,
    Neg,
    ParseError,
    UnknownIdentifierError,
    Var,
    cauchy_riemann_residual,
    compile_expr,
    compile_real,
    differentiate,
    eval_expr,
    parse_expr,
    parse_real_expr,
    to_source,
)


def ev(src, w):
    return eval_expr(parse_expr(src), w)


class TestParse:
    def test_precedence_pow_before_mul(self):
        assert ev("2*z^3", 2) == 16

    def test_pow_right_associative(self):
        assert ev("2^3^2", 0) == 512

    def test_pow_binds_tighter_than_unary_minus(self):
        assert ev("-z^2", 3) == -9

    def test_unary_minus_in_exponent(self):
        assert ev("2^-2", 0) == 0.25

    def test_whitespace_insensitive(self):
        a = parse_expr("z ^ 2 + 1")
        b = parse_expr("z^2+1")
        assert a == b

    def test_structure(self):
        assert parse_expr("z+1") == BinOp("+", Var("z"), Lit(1 + 0j))
        assert parse_expr("-z") == Neg(Var("z"))
        assert parse_expr("exp(z)") == Call("exp", Var("z"))

    def test_constants(self):
        assert ev("i^2 + 1", 0) == 0
        assert abs(ev("e^(i*pi)", 0) + 1) < 1e-15

    def test_number_forms(self):
        assert ev("1.5e2", 0) == 150
        assert ev(".5", 0) == 0.5

    def test_syntax_error_offset_and_expected(self):
        with pytest.raises(ParseError) as ei:
            parse_expr("z +")
        assert ei.value.offset == 3
        assert any("identifier" in e for e in ei.value.expected)

    def test_unbalanced_paren(self):
        with pytest.raises(ParseError) as ei:
            parse_expr("(z + 1")
        assert ei.value.offset == 6

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError) as ei:
            parse_expr("w + 1")
        assert ei.value.name == "w"
        assert ei.value.offset == 0

    def test_unknown_function(self):
        with pytest.raises(UnknownIdentifierError):
            parse_expr("tan(z)")

    def test_stray_character(self):
        with pytest.raises(ParseError) as ei:
            parse_expr("z ? 1")
        assert ei.value.offset == 2

    def test_real_mode_rejects_imaginary_unit(self):
        with pytest.raises(UnknownIdentifierError):
            parse_real_expr("i*u")
        ast = parse_real_expr("u^2 - v^2")
        assert eval_expr(ast, {"u": 3, "v": 1}) == 8

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse_expr("z 1")


class TestEval:
    def test_principal_log(self):
        assert abs(ev("log(z)", -1) - cmath.pi * 1j) < 1e-15

    def test_log_zero_is_domain_error(self):
        with pytest.raises(EvalError):
            ev("log(z)", 0)

    def test_division_by_zero(self):
        with pytest.raises(EvalError):
            ev("1/z", 0)

    def test_overflow_flagged(self):
        with pytest.raises(EvalError):
            ev("exp(exp(z))", 10)

    def test_inf_product_flagged(self):
        with pytest.raises(EvalError):
            ev("(10^200)*(10^200)", 0)

    def test_zero_to_fractional_power(self):
        with pytest.raises(EvalError):
            ev("z^0.5", 0)

    def test_integer_power_of_zero(self):
        assert ev("z^3", 0) == 0

    def test_principal_fractional_power(self):
        got = ev("z^0.5", -4)
        assert abs(got - 2j) < 1e-14

    def test_unbound_variable(self):
        with pytest.raises(EvalError):
            eval_expr(Var("q"), {"z": 1})

    def test_compiled_matches_interpreter(self):
        rng = random.Random(7)
        corpus = [
            "z^3 - 2*z + 1",
            "exp(z)*sin(z)",
            "log(z + 3)",
            "cosh(z)/(1 + z^2)",
            "(z - i)^2 * (z + i)",
            "sin(cos(z))",
            "z^(1/3)",
        ]
        for src in corpus:
            ast = parse_expr(src)
            fn = compile_expr(ast)
            for _ in range(20):
                w = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
                try:
                    ref = eval_expr(ast, w)
                except EvalError:
                    with pytest.raises(EvalError):
                        fn(w)
                    continue
                assert fn(w) == ref


class TestRoundTrip:
    CORPUS = [
        "z", "-z", "z+1", "z - 1 + 2", "2*z^3", "-z^2", "2^3^2",
        "z*(z + 1)", "(z + 1)/(z - 1)", "exp(z)", "log(z)*sin(z)",
        "cos(z)^2 + sin(z)^2", "z/2/3", "1 - -z", "-(z + 1)^2",
        "i*z", "pi*e", "z^-2", "sinh(z) + cosh(z)", "(-z)^2",
        "z^(z + 1)", "1/z^2", "-2^2", "z*2^z", "exp(-z^2/2)",
        "z - (1 - z)", "(z/(1 + z))^3", "0.5*z", "1.5e-2 + z",
        "sin(z*pi)", "log(exp(z))", "z^2^z", "-(-z)", "3.25*z^4",
        "(z + i)*(z - i)", "z/(2*i)", "cos(-z)", "2/(3/z)",
        "z^(1/2)", "exp(i*z)", "-i*z", "(1 + z)^(1 + z)",
        "z*z*z", "z + z + z", "1 - z - 1", "sinh(cosh(z))",
        "pi", "e", "i", "-pi*z^2", "(2 - z)^3",
    ]

    @pytest.mark.parametrize("src", CORPUS)
    def test_parse_print_parse(self, src):
        ast = parse_expr(src)
        assert parse_expr(to_source(ast)) == ast


class TestDifferentiate:
    def test_polynomial(self):
        d = differentiate(parse_expr("z^2"))
        assert eval_expr(d, 5) == 10

    def test_exp(self):
        d = differentiate(parse_expr("exp(z)"))
        assert d == Call("exp", Var("z"))

    def test_constant(self):
        assert differentiate(parse_expr("pi")) == Lit(0j)

    def test_quotient_and_chain(self):
        ast = parse_expr("sin(z^2)/z")
        d = differentiate(ast)
        w = 1.3 + 0.2j
        h = 1e-6
        fd = (eval_expr(ast, w + h) - eval_expr(ast, w - h)) / (2 * h)
        assert abs(eval_expr(d, w) - fd) < 1e-7

    def test_general_power(self):
        ast = parse_expr("z^z")
        d = differentiate(ast)
        w = 1.2 + 0.3j
        expect = eval_expr(ast, w) * (cmath.log(w) + 1)
        assert abs(eval_expr(d, w) - expect) < 1e-12

    def test_partial_derivatives_two_vars(self):
        ast = parse_real_expr("u^3 - 3*u*v^2")
        du = differentiate(ast, "u")
        dv = differentiate(ast, "v")
        env = {"u": 2.0, "v": 1.0}
        assert eval_expr(du, env) == 9  # 3u^2 - 3v^2
        assert eval_expr(dv, env) == -12  # -6uv

    def test_derivative_source_reparses_to_same_values(self):
        for src in ["z^3*exp(z)", "log(z + 2)/z", "cos(z)^3"]:
            d = differentiate(parse_expr(src))
            d2 = parse_expr(to_source(d))
            w = 0.7 - 0.4j
            assert abs(eval_expr(d, w) - eval_expr(d2, w)) < 1e-14


def _random_ast(rng, depth, variables=("z",)):
    roll = rng.random()
    if depth <= 0 or roll < 0.25:
        kind = rng.random()
        if kind < 0.45:
            return Lit(complex(round(rng.uniform(-2, 2), 3)))
        if kind < 0.55:
            return Lit(complex(0, round(rng.uniform(-2, 2), 3)))
        return Var(rng.choice(variables))
    if roll < 0.35:
        return Neg(_random_ast(rng, depth - 1, variables))
    if roll < 0.75:
        op = rng.choice("+-*/")
        return BinOp(op, _random_ast(rng, depth - 1, variables),
                     _random_ast(rng, depth - 1, variables))
    if roll < 0.85:
        # keep exponents small integers so derivatives stay tame
        return BinOp("^", _random_ast(rng, depth - 1, variables),
                     Lit(complex(rng.randint(1, 3))))
    fn = rng.choice(["exp", "log", "sin", "cos", "sinh", "cosh"])
    return Call(fn, _random_ast(rng, depth - 1, variables))


def _tame_at(fn, w, bound=1e3):
    try:
        vals = [fn(w), fn(w + 1e-5), fn(w - 1e-5),
                fn(w + 1e-5j), fn(w - 1e-5j)]
    except EvalError:
        return None
    if any(abs(v) > bound for v in vals):
        return None
    return vals[0]


def test_derivative_matches_finite_difference_1000_samples():
    rng = random.Random(20260814)
    checked = 0
    while checked < 1000:
        ast = _random_ast(rng, rng.randint(1, 3))
        d = differentiate(ast)
        fn = compile_expr(ast)
        dfn = compile_expr(d)
        w = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        if _tame_at(fn, w) is None or _tame_at(dfn, w) is None:
            continue
        h = 1e-5
        try:
            fd1 = (fn(w + h) - fn(w - h)) / (2 * h)
            fd2 = (fn(w + h / 2) - fn(w - h / 2)) / h
            exact = dfn(w)
        except EvalError:
            continue
        # two-step agreement certifies the stencil converged at this point;
        # only then is the comparison against the symbolic value meaningful
        if abs(fd1 - fd2) > 1e-7 * max(1.0, abs(exact)):
            continue
        assert abs(fd2 - exact) <= 1e-5 * max(1.0, abs(exact)), (
            f"{to_source(ast)} at {w}: {fd2} vs {exact}")
        checked += 1
    assert checked == 1000


def test_round_trip_50_random_expressions():
    rng = random.Random(99)
    done = 0
    while done < 50:
        ast = _random_ast(rng, 3)
        src = to_source(ast)
        reparsed = parse_expr(src)
        # structural equality after one more print/parse cycle
        assert parse_expr(to_source(reparsed)) == reparsed
        done += 1


class TestCauchyRiemann:
    def test_polynomial_residual_small(self):
        ast = parse_expr("z^2")
        assert cauchy_riemann_residual(ast, 0.3 + 0.7j, 1e-4) < 1e-6

    def test_exp_residual_small(self):
        ast = parse_expr("exp(z)")
        assert cauchy_riemann_residual(ast, 0.2 - 0.1j, 1e-4) < 1e-6

    def test_log_near_branch_cut_blows_up(self):
        # stencil straddles the negative real axis: the imaginary part of
        # log jumps by ~2*pi across the cut, so y_v sees roughly
        # 2*pi/(2*step); freeze that as the oracle
        ast = parse_expr("log(z)")
        w = -1 + 0.001j
        step = 0.01
        lo = cmath.log(complex(-1, 0.001 - step))
        hi = cmath.log(complex(-1, 0.001 + step))
        jump = abs((hi.imag - lo.imag) / (2 * step) - 1.0)
        res = cauchy_riemann_residual(ast, w, step)
        assert res > 100
        assert abs(res - jump) / jump < 0.05

    def test_random_expressions_residual_small(self):
        # away from cuts and poles every grammar expression is holomorphic;
        # keep |f''| and |f'''| moderate so the O(step^2) stencil error
        # stays below the asserted bound
        rng = random.Random(4242)
        done = 0
        while done < 200:
            ast = _random_ast(rng, 2)
            fn = compile_expr(ast)
            w = complex(rng.uniform(-1, 1), rng.uniform(0.1, 1))
            if _tame_at(fn, w, bound=50) is None:
                continue
            try:
                d2 = differentiate(differentiate(ast))
                d3 = differentiate(d2)
                if abs(compile_expr(d2)(w)) > 1e2:
                    continue
                if abs(compile_expr(d3)(w)) > 1e3:
                    continue
                res = cauchy_riemann_residual(ast, w, 1e-5)
            except EvalError:
                continue
            assert res < 1e-6, f"{to_source(ast)} at {w}: residual {res}"
            done += 1
        assert done == 200


def test_compile_real_rejects_complex_values():
    ast = parse_real_expr("u^0.5")
    f = compile_real(ast)
    assert f(4.0, 0.0) == 2.0
    with pytest.raises(EvalError):
        f(-4.0, 0.0)
