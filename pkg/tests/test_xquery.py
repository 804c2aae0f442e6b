import pytest

from xwebbench.errors import RenderError
from xwebbench.workload.queries import WORKLOAD, Comparison, WorkloadConfig, query_by_id
from xwebbench.workload.xquery import export_workload, render_xquery


def test_grand_total_has_no_ordering(model):
    text = render_xquery(query_by_id("Q01"), model)
    assert "order by" not in text
    assert 'doc("f_sale.xml")/facts/fact' in text
    assert "min(for $v in $group/f_quantity return xs:integer($v))" in text


def test_descending_ordering(model):
    text = render_xquery(query_by_id("Q04"), model)
    assert "order by xs:decimal($group[1]/p_retailprice) descending, xs:integer($group[1]/p_partkey)" in text
    assert "xs:decimal(" in text and "> 1500" in text


def test_nation_restriction_walks_customer_hierarchy(model):
    text = render_xquery(query_by_id("Q03"), model)
    assert 'doc("d_customer.xml")' in text
    assert 'rollup[@level="C_Nation"]/@ref' in text
    assert '= "FRANCE"' in text
    assert "d_supplier.xml" not in text


def test_quarter_restriction(model):
    assert "ceiling(" in render_xquery(query_by_id("Q05"), model)


def test_supercategory_query_declares_recursive_function(model):
    assert "declare function local:supercategories" in render_xquery(query_by_id("Q20"), model)
    assert "local:supercategories" not in render_xquery(query_by_id("Q19"), model)


def test_rendering_is_deterministic(model):
    for q in WORKLOAD:
        assert render_xquery(q, model) == render_xquery(q, model)


def test_unknown_attribute_cannot_be_rendered(model):
    q = query_by_id("Q03").model_copy(update={"restriction": Comparison(attribute="o_orderdate", op="=", value=1)})
    with pytest.raises(RenderError, match="o_orderdate"):
        render_xquery(q, model)


def test_export_writes_one_file_per_query(tmp_path, model):
    written = export_workload(tmp_path / "queries", WorkloadConfig.from_blocks("RE,2D"), model)
    assert [p.name for p in written] == ["Q01.xq", "Q02.xq", "Q03.xq", "Q08.xq", "Q09.xq", "Q10.xq", "Q11.xq"]
    assert written[0].read_text(encoding="utf-8").startswith("(: Q01 RE:")


def test_currency_is_aggregated_as_decimal(model):
    text = render_xquery(query_by_id("Q03"), model)
    assert "sum(for $v in $group/f_totalamount return xs:decimal($v))" in text
    assert "sum($group/f_totalamount)" not in text
