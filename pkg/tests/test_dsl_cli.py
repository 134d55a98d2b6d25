import json

import pytest
import sympy as sp

from varseq import cli, dsl, render
from varseq import forms as fm
from varseq.forms import Dx, Omega
from varseq.jet_space import MultiIndex

MECH = """
space { base t; fibre q; }
param m;
form lam : degree 1 order 1 = m/2 * q_t**2 * d(t);
form eps : degree 2 order 2 = -m*q_tt * w(q)^d(t);
field shift = D(q);
field time = D(t);
"""


def test_parse_basic_model():
    model = dsl.parse(MECH)
    assert model.space.base_names == ("t",)
    assert model.params == ("m",)
    assert set(model.forms) == {"lam", "eps"}
    assert set(model.fields) == {"shift", "time"}
    assert model.forms["lam"].degree == 1 and model.forms["lam"].order == 1


def test_parse_error_locations():
    with pytest.raises(dsl.DslError) as err:
        dsl.parse("space { base t; fibre q; }\nform f : degree 1 order 1 = "
                  "zz * d(t);")
    assert err.value.line == 2
    assert "zz" in str(err.value)


def test_parse_undeclared_and_order_violation():
    with pytest.raises(dsl.DslError, match="unknown"):
        dsl.parse("space { base t; fibre q; }\n"
                  "form f : degree 1 order 1 = d(z);")
    with pytest.raises(dsl.DslError, match="order"):
        dsl.parse("space { base t; fibre q; }\n"
                  "form f : degree 1 order 1 = q_tt * d(t);")


def test_parse_empty_fibre_rejected():
    with pytest.raises(dsl.DslError):
        dsl.parse("space { base t; fibre ; }")


def test_multiindex_canonicalized_with_warning():
    model = dsl.parse("space { base t x; fibre q; }\n"
                      "form f : degree 1 order 4 = w(q,[x,t,x]);")
    assert model.warnings
    (atoms,) = model.forms["f"].terms
    assert atoms == (Omega(1, MultiIndex((1, 2, 2))),)


def test_d_of_fibre_coordinate_expands_contact_basis():
    model = dsl.parse("space { base t; fibre q; }\n"
                      "form f : degree 1 order 1 = d(q);")
    f = model.forms["f"]
    assert f.coefficient((Omega(1, MultiIndex()),)) == 1
    assert f.coefficient((Dx(1),)) == sp.Symbol("q_t")


def test_opaque_declaration_and_use():
    model = dsl.parse("space { base t; fibre q; }\n"
                      "opaque L(t, q, q_t);\n"
                      "form lam : degree 1 order 1 = L * d(t);")
    coeff = model.forms["lam"].coefficient((Dx(1),))
    assert coeff.func.__name__ == "L"


def test_render_parse_round_trip():
    model = dsl.parse(MECH)
    text = render.render_model(model)
    model2 = dsl.parse(text)
    assert render.render_model(model2) == text
    for name in model.forms:
        assert model.forms[name].equals(model2.forms[name]) is True
        assert model.forms[name].order == model2.forms[name].order
    for name in model.fields:
        assert dict(model.fields[name].xi) == dict(model2.fields[name].xi)
        assert dict(model.fields[name].Xi) == dict(model2.fields[name].Xi)


def test_form_text_is_reparseable():
    model = dsl.parse(MECH)
    from varseq import variational as vr
    el = vr.euler_lagrange(model.forms["lam"]).form
    text = render.form_text(el)
    doc = ("space { base t; fibre q; }\nparam m;\n"
           "form f : degree %d order %d = %s;" % (el.degree, el.order, text))
    back = dsl.parse(doc).forms["f"]
    assert back.equals(el) is True


@pytest.fixture
def model_file(tmp_path):
    path = tmp_path / "mech.jv"
    path.write_text(MECH)
    return str(path)


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_every_command_runs(model_file, capsys):
    calls = [
        ("el", "--form", "lam"),
        ("helmholtz", "--form", "eps"),
        ("helmholtz-reduced", "--form", "eps"),
        ("cartan", "--form", "lam"),
        ("lepage-check", "--form", "lam"),
        ("lepage", "--form", "eps"),
        ("tonti", "--form", "eps"),
        ("trivial", "--form", "lam"),
        ("noether", "--form", "lam", "--field", "time"),
        ("first-variation", "--form", "lam", "--field", "shift"),
        ("lie", "--form", "lam", "--field", "shift"),
        ("class-eq", "--form", "lam", "--form", "lam"),
        ("probe", "--form", "lam", "--form", "eps"),
    ]
    for call in calls:
        for fmt in ("text", "latex", "json"):
            code, out, _ = run_cli(capsys, call[0], model_file,
                                   "--format", fmt, *call[1:])
            assert code == 0, (call, fmt)
            assert out.strip()


def test_cli_el_text_output(model_file, capsys):
    code, out, _ = run_cli(capsys, "el", model_file, "--form", "lam")
    assert code == 0
    assert out.strip() == "(m*q_tt) * d(t)^w(q)"


def test_cli_exit_code_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.jv"
    bad.write_text("space { base t; fibre q; }\n"
                   "form f : degree 1 order 1 = q_tt * d(t);")
    code, _, err = run_cli(capsys, "el", str(bad))
    assert code == 1
    assert "order" in err


def test_cli_exit_code_math_precondition(tmp_path, capsys):
    bad = tmp_path / "nonvar.jv"
    bad.write_text("space { base t; fibre q; }\n"
                   "form eps : degree 2 order 1 = q*q_t * w(q)^d(t);")
    code, _, err = run_cli(capsys, "tonti", str(bad))
    assert code == 2
    assert "variational" in err


def test_cli_exit_code_missing_file(capsys):
    code, _, err = run_cli(capsys, "el", "/no/such/file.jv")
    assert code == 1


def test_cli_unknown_form_is_usage_error(model_file, capsys):
    code, _, err = run_cli(capsys, "el", model_file, "--form", "nope")
    assert code == 1
    assert "nope" in err


def test_cli_json_validates_against_schema(model_file, capsys):
    from jsonschema import Draft202012Validator
    from referencing import Registry, Resource
    import pathlib
    docs = pathlib.Path(__file__).resolve().parent.parent / "docs"
    form_schema = json.loads((docs / "form.schema.json").read_text())
    out_schema = json.loads((docs / "output.schema.json").read_text())
    registry = Registry().with_resources([
        ("form.schema.json", Resource.from_contents(form_schema)),
    ])
    validator = Draft202012Validator(out_schema, registry=registry)
    for call in [("el", "--form", "lam"), ("tonti", "--form", "eps"),
                 ("first-variation", "--form", "lam", "--field", "shift"),
                 ("lepage-check", "--form", "lam"),
                 ("probe", "--form", "lam", "--form", "eps")]:
        code, out, _ = run_cli(capsys, call[0], model_file,
                               "--format", "json", *call[1:])
        assert code == 0
        errors = list(validator.iter_errors(json.loads(out)))
        assert not errors, (call, errors[:1])


def test_cli_warning_on_unsorted_multiindex(tmp_path, capsys):
    path = tmp_path / "warn.jv"
    path.write_text("space { base t x; fibre q; }\n"
                    "form f : degree 2 order 4 = w(q,[x,t,x])^d(t);\n")
    code, _, err = run_cli(capsys, "lepage-check", str(path))
    assert code == 0
    assert "canonicalized" in err
