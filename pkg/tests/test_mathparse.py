import pytest

from simdex.mathparse import (AbsGroup, Env, FormulaError, Frac, Func, Group, Ident,
                              NormalizationTable, Number, Op, Opaque, Prime, Script, Seq,
                              leaf_count, leaves, lex_formula, normalize, parse,
                              parse_formula, parse_normalized, parse_rule, to_latex,
                              trim_punctuation)


def kinds(src):
    return [(t.kind, t.value) for t in lex_formula(src)]


class TestLexer:
    def test_juxtaposed_letters_split(self):
        assert kinds("a+bx") == [("ident", "a"), ("op", "+"), ("ident", "b"), ("ident", "x")]

    def test_negative_fractional_exponent(self):
        toks = kinds("y = a + bx^{-1/2}")
        assert toks[-8:] == [("ident", "x"), ("sup", "^"), ("open", "group"), ("op", "−"),
                             ("number", "1"), ("op", "/"), ("number", "2"), ("close", "group")]

    def test_exp_command(self):
        assert kinds("\\exp(ax)") == [("command", "exp"), ("open", "paren"), ("ident", "a"),
                                      ("ident", "x"), ("close", "paren")]

    def test_unknown_command_is_command(self):
        assert ("command", "foo") in kinds("\\foo x")

    def test_greek_letters_are_idents(self):
        assert kinds("\\alpha+\\lambda") == [("ident", "α"), ("op", "+"), ("ident", "λ")]

    def test_offsets_are_bytes(self):
        toks = lex_formula("α+x")
        assert [t.offset for t in toks] == [0, 2, 3]

    def test_decimal_number(self):
        assert kinds("3.25x") == [("number", "3.25"), ("ident", "x")]

    def test_primes(self):
        assert kinds("y''") == [("ident", "y"), ("op", "′"), ("op", "′")]


class TestParser:
    def test_example_one_grouped_power(self):
        tree = parse("g = (1 + |z| + |f|)^{1/2}")
        assert tree.children[:2] == (Ident("g"), Op("="))
        script = tree.children[2]
        assert isinstance(script, Script) and isinstance(script.base, Group)
        inner = script.base.child.children
        assert AbsGroup(Ident("z")) in inner and AbsGroup(Ident("f")) in inner
        assert script.sup == Seq((Number("1"), Op("/"), Number("2")))

    def test_example_one_only_abs_f_raised(self):
        tree = parse("g = 1 + |z| + |f|^{1/2}")
        assert tree.children[-1] == Script(AbsGroup(Ident("f")), None,
                                           Seq((Number("1"), Op("/"), Number("2"))))
        assert tree != parse("g = (1 + |z| + |f|)^{1/2}")

    def test_example_two_has_no_script(self):
        flat = parse("y = a + bx - 1/2")
        assert not any(isinstance(c, Script) for c in flat.children)
        assert Op("−") in flat.children
        assert flat != parse("y = a + bx^{-1/2}")

    def test_equation_one_shape(self):
        tree = parse("u_{tt} = [f(u)u_x]_x + g(u)")
        head = tree.children[0]
        assert head == Script(Ident("u"), Seq((Ident("t"), Ident("t"))), None)
        bracket = tree.children[2]
        assert isinstance(bracket, Script) and bracket.base.kind == "square"
        assert tree.children[-2:] == (Ident("g"), Group("paren", Ident("u")))

    def test_single_letter_function_is_not_func(self):
        tree = parse("f(u)")
        assert tree.children == (Ident("f"), Group("paren", Ident("u")))

    def test_known_function_is_func(self):
        assert parse("\\sin(x)").children == (Func("sin", Group("paren", Ident("x"))),)
        assert parse("\\sin x").children == (Func("sin", Group("group", Ident("x"))),)

    def test_frac(self):
        assert parse("\\frac{a}{b}").children == (Frac(Ident("a"), Ident("b")),)

    def test_prime_node(self):
        assert parse("y''").children == (Prime(Ident("y"), 2),)

    def test_bracket_kind_matters(self):
        assert parse("(a)") != parse("[a]")

    def test_unknown_command_without_argument_is_opaque(self):
        assert parse("\\foo + x").children[0] == Opaque("\\foo")

    def test_aligned_environment(self):
        tree = parse("\\begin{aligned} a &= b, \\\\ c &= d \\end{aligned}")
        env = tree.children[0]
        assert isinstance(env, Env) and len(env.rows) == 2

    @pytest.mark.parametrize("src", ["(a+b", "a+b)", "x^", "x_", "|a| + |b", "a^b^c", "[a)"])
    def test_errors(self, src):
        with pytest.raises(FormulaError) as info:
            parse(src)
        assert info.value.offset >= 0

    def test_trim_trailing_punctuation(self):
        assert trim_punctuation(parse("u = f(x).")) == parse("u = f(x)")


class TestNormalize:
    def test_e_power_is_exp(self):
        assert parse_normalized("e^x") == parse_normalized("\\exp x")
        assert parse_normalized("e^{x}") == Seq((Func("exp", Group("group", Ident("x"))),))

    def test_identity_without_rule(self):
        tree = parse("y = a + b")
        assert normalize(tree) == tree

    def test_styling_stripped(self):
        assert parse_normalized("\\mathbf{u}_t") == parse_normalized("u_t")
        assert parse_normalized("\\boldsymbol{\\alpha} x") == parse_normalized("\\alpha x")

    def test_lone_e_stays_identifier(self):
        assert Ident("e") in parse_normalized("bex").children

    def test_custom_rule(self):
        table = NormalizationTable.from_lines(["\\tg{#1} => \\tan{#1}"])
        assert parse_normalized("\\tg{x}", table) == parse_normalized("\\tan{x}", table)

    def test_rule_syntax_error(self):
        with pytest.raises(ValueError):
            parse_rule("no arrow here")

    def test_idempotent(self):
        tree = parse_normalized("e^{e^{x}} + y")
        assert normalize(tree) == tree


class TestLeafCount:
    @pytest.mark.parametrize("src,count", [
        ("y=a+b", 5),
        ("u_t = a u_{xx}", 7),
        ("u_{tt} = a u_{xx}", 8),
        ("x", 1),
        ("y''", 3),
        ("\\sin(x)", 2),
        ("e^x", 2),
        ("\\exp x", 2),
        ("(a)", 1),
    ])
    def test_counts(self, src, count):
        assert leaf_count(parse_normalized(src)) == count

    def test_leaves_preorder(self):
        assert list(leaves(parse("a+\\sin x"))) == [("ident", "a"), ("op", "+"),
                                                   ("func", "sin"), ("ident", "x")]


def test_parse_formula_rejects_nothing_valid():
    assert parse_formula(lex_formula("a")) == Seq((Ident("a"),))


def test_to_latex_roundtrip():
    for src in ["g = (1 + |z| + |f|)^{1/2}", "u_{tt} = [f(u)u_x]_x + g(u)", "\\frac{a}{b+1}",
                "y'' + \\sin(x) = 0"]:
        tree = parse_normalized(src)
        assert parse_normalized(to_latex(tree)) == tree
