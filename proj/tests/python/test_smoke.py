import json
import math

import pytest

import facade_bn as fb

M13 = "[B][C][DO][PL][T][DC|B][CE|DC][RF|DC][TR|RF][MD|TR]"


@pytest.fixture(scope="module")
def data():
    schema = fb.default_facade_schema()
    dag = fb.parse_model_string(M13, schema)
    # Fit on a small hand-made table, then sample from it.
    rows = ["B,T,C,DC,DO,PL,RF,MD,TR,CE"]
    levels = {n: schema.levels(n) for n in schema.names}
    for i in range(60):
        rows.append(",".join(levels[n][(i + j * (i % 3)) % 3] for j, n in enumerate(
            ["B", "T", "C", "DC", "DO", "PL", "RF", "MD", "TR", "CE"])))
    seed_data = fb.load_dataset("\n".join(rows) + "\n", schema)
    fitted = fb.fit_mle(dag, seed_data)
    return fb.forward_sample(fitted, 200, 7, allow_unsupported=True)


def test_version():
    assert fb.__version__.count(".") == 2


def test_schema_and_parse():
    schema = fb.default_facade_schema()
    assert len(schema) == 10
    assert schema.joint_state_count() == 3 ** 10
    dag = fb.parse_model_string(M13, schema)
    assert dag.arc_count == 5
    assert str(dag) == fb.to_model_string(dag)
    with pytest.raises(fb.Error):
        fb.parse_model_string("[B][B]", schema)
    lenient = fb.parse_model_string(fb.INITIAL_FACADE_MODEL.replace("MD:TR", "MOD:TR"), schema, lenient=True)
    assert fb.param_count(lenient, schema) == 252


def test_constraints_and_random_dag():
    schema = fb.default_facade_schema()
    dag = fb.random_dag(schema, 3)
    ok, violations = fb.check_constraints(dag)
    assert ok and violations == []
    assert str(fb.random_dag(schema, 3)) == str(dag)
    ok, violations = fb.check_constraints(fb.empty_dag(schema))
    assert not ok and violations


def test_chi2_and_ci(data):
    assert abs(fb.chi2_sf(21.477, 12) - 0.04381) < 5e-5
    r = fb.ci_test(data, "CE", "DC", ["B"], "x2")
    assert r["df"] == 12
    assert 0.0 <= r["p_value"] <= 1.0


def test_scores(data):
    dag = fb.parse_model_string(M13, data.schema)
    s = fb.score(dag, data, "bic")
    assert math.isclose(s["total"], sum(s["per_node"].values()), abs_tol=1e-9)
    assert fb.score(dag, data, "bdeu", 1.0)["total"] < 0


def test_query_and_roundtrip(data):
    fitted = fb.fit_mle(fb.parse_model_string(M13, data.schema), data)
    post = fb.query(fitted, "CE", {"DC": "DC_HY"})
    assert math.isclose(sum(post["distribution"].values()), 1.0, abs_tol=1e-12)
    again = fb.FittedNetwork.from_json(fitted.to_json())
    assert json.loads(again.to_json()) == json.loads(fitted.to_json())


def test_top_networks():
    top = fb.top_networks([("[a]", -2.0), ("[b]", -1.0), ("[c]", -1.0)], 2)
    assert top == [("[b]", -1.0), ("[c]", -1.0)]


def test_search_and_diagnostics(data):
    result = fb.search(data, n=20, top=3, seed=5)
    assert len(result["top"]) == 3
    assert result == fb.search(data, n=20, top=3, seed=5)
    trace = [math.sin(i * 0.7) + (i % 5) * 0.1 for i in range(500)]
    assert fb.ess(trace) > 0
    assert fb.acf(trace, 5)[0] == pytest.approx(1.0)


def test_mcmc(data):
    dag = fb.parse_model_string(M13, data.schema)
    report = fb.mcmc(dag, data, chains=2, iters=200, warmup=100, seed=3)
    assert report and all("coefficient" in r or "label" in r for r in report)
