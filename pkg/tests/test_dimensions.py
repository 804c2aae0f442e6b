from decimal import Decimal

import pytest

from conftest import tiny_params
from xwebbench.datagen.dimensions import generate_dimensions, retail_price
from xwebbench.datagen.params import GenParams
from xwebbench.errors import ParameterError


def test_desk_scale_cardinalities():
    dims = generate_dimensions(GenParams.create(density=0.001, scale_divisor=1000))
    assert dims.cardinalities() == {"customers": 150, "parts": 200, "suppliers": 10, "days": 2557}
    assert len(dims.regions) == 5
    assert len(dims.nations) == 25
    assert len(dims.months) == 84
    assert sorted(dims.years) == list(range(1998, 2005))


def test_tiny_scale_cardinalities():
    dims = generate_dimensions(tiny_params())
    assert dims.cardinalities() == {"customers": 15, "parts": 20, "suppliers": 1, "days": 2557}


def test_dimensions_are_deterministic():
    assert generate_dimensions(tiny_params(seed=3)) == generate_dimensions(tiny_params(seed=3))
    assert generate_dimensions(tiny_params(seed=3)).parts != generate_dimensions(tiny_params(seed=4)).parts


def test_members_are_well_formed():
    dims = generate_dimensions(tiny_params())
    for customer in dims.customers.values():
        assert customer.nationkey in dims.nations
        assert Decimal("-999.99") <= customer.acctbal <= Decimal("9999.99")
    for part in dims.parts.values():
        assert 1 <= part.size <= 50
        assert part.retailprice == retail_price(part.partkey)
    assert dims.days[19980101].dayname == "Thursday"
    assert dims.days[20001231].month == 200012
    assert dims.months[200012].monthname == "December"


def test_retail_price_formula():
    assert retail_price(1) == Decimal("901.00")
    assert retail_price(200) == Decimal("1100.20")


def test_divisor_too_large_for_suppliers():
    with pytest.raises(ParameterError, match="suppliers"):
        generate_dimensions(GenParams.create(density=0.5, scale_divisor=1_000_000))


@pytest.mark.parametrize("values", [
    {"density": 0},
    {"density": 1.5},
    {"density": 0.1, "p_missing": -0.1},
    {"density": 0.1, "sf": 0},
    {"density": 0.1, "scale_divisor": 0},
])
def test_invalid_parameters(values):
    with pytest.raises(ParameterError):
        GenParams.create(**values)
