import logging
import math
import random
from dataclasses import dataclass, field
from datetime import date, timedelta
from decimal import Decimal
from typing import Dict

from xwebbench.datagen.params import GenParams
from xwebbench.datagen.sampling import stream
from xwebbench.errors import ParameterError

logger = logging.getLogger(__name__)

# TPC-H base cardinalities at SF = 1
PART_BASE = 200_000
CUSTOMER_BASE = 150_000
SUPPLIER_BASE = 10_000

FIRST_DAY = date(1998, 1, 1)
LAST_DAY = date(2004, 12, 31)

REGIONS = ("AFRICA", "AMERICA", "ASIA", "EUROPE", "MIDDLE EAST")

# (name, regionkey), indexed by nationkey
NATIONS = (
    ("ALGERIA", 0), ("ARGENTINA", 1), ("BRAZIL", 1), ("CANADA", 1), ("EGYPT", 4),
    ("ETHIOPIA", 0), ("FRANCE", 3), ("GERMANY", 3), ("INDIA", 2), ("INDONESIA", 2),
    ("IRAN", 4), ("IRAQ", 4), ("JAPAN", 2), ("JORDAN", 4), ("KENYA", 0),
    ("MOROCCO", 0), ("MOZAMBIQUE", 0), ("PERU", 1), ("CHINA", 2), ("ROMANIA", 3),
    ("SAUDI ARABIA", 4), ("VIETNAM", 2), ("RUSSIA", 3), ("UNITED KINGDOM", 3), ("UNITED STATES", 1),
)

MARKET_SEGMENTS = ("AUTOMOBILE", "BUILDING", "FURNITURE", "HOUSEHOLD", "MACHINERY")

MONTH_NAMES = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)
DAY_NAMES = ("Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday")

COLORS = (
    "almond", "antique", "aquamarine", "azure", "beige", "bisque", "black", "blanched",
    "blue", "blush", "brown", "burlywood", "burnished", "chartreuse", "chiffon", "chocolate",
    "coral", "cornflower", "cornsilk", "cream", "cyan", "dark", "deep", "dim",
    "dodger", "drab", "firebrick", "floral", "forest", "frosted", "gainsboro", "ghost",
    "goldenrod", "green", "grey", "honeydew", "hot", "indian", "ivory", "khaki",
    "lace", "lavender", "lawn", "lemon", "light", "lime", "linen", "magenta",
    "maroon", "medium", "metallic", "midnight", "mint", "misty", "moccasin", "navajo",
    "navy", "olive", "orange", "orchid", "pale", "papaya", "peach", "peru",
    "pink", "plum", "powder", "puff", "purple", "red", "rose", "rosy",
    "royal", "saddle", "salmon", "sandy", "seashell", "sienna", "sky", "slate",
    "smoke", "snow", "spring", "steel", "tan", "thistle", "tomato", "turquoise",
    "violet", "wheat", "white", "yellow",
)

# Account balances are uniform over [-999.99, 9999.99], in cents
ACCTBAL_MIN_CENTS = -99_999
ACCTBAL_MAX_CENTS = 999_999

CENT = Decimal("0.01")


def cents(value: int) -> Decimal:
    return (Decimal(value) * CENT).quantize(CENT)


@dataclass(frozen=True)
class Region:
    regionkey: int
    name: str


@dataclass(frozen=True)
class Nation:
    nationkey: int
    name: str
    regionkey: int


@dataclass(frozen=True)
class Customer:
    custkey: int
    name: str
    acctbal: Decimal
    mktsegment: str
    nationkey: int


@dataclass(frozen=True)
class Supplier:
    suppkey: int
    name: str
    acctbal: Decimal
    nationkey: int


@dataclass(frozen=True)
class Part:
    partkey: int
    name: str
    brand: str
    retailprice: Decimal
    size: int


@dataclass(frozen=True)
class Year:
    yearkey: int


@dataclass(frozen=True)
class Month:
    key: int          # YYYYMM, unique across years
    monthkey: int     # 1..12
    monthname: str
    yearkey: int


@dataclass(frozen=True)
class Day:
    datekey: int      # YYYYMMDD
    dayname: str
    month: int        # Month.key


@dataclass
class DimensionSet:
    """Member tables of the four dimensions, keyed by surrogate key."""
    regions: Dict[int, Region] = field(default_factory=dict)
    nations: Dict[int, Nation] = field(default_factory=dict)
    customers: Dict[int, Customer] = field(default_factory=dict)
    suppliers: Dict[int, Supplier] = field(default_factory=dict)
    parts: Dict[int, Part] = field(default_factory=dict)
    years: Dict[int, Year] = field(default_factory=dict)
    months: Dict[int, Month] = field(default_factory=dict)
    days: Dict[int, Day] = field(default_factory=dict)

    def cardinalities(self) -> Dict[str, int]:
        return {
            "customers": len(self.customers),
            "parts": len(self.parts),
            "suppliers": len(self.suppliers),
            "days": len(self.days),
        }


def retail_price(partkey: int) -> Decimal:
    """TPC-H retail price formula, exact to the cent."""
    return cents(90000 + (partkey // 10) % 20001 + 100 * (partkey % 1000))


def cardinality(gp: GenParams, base: int, table: str) -> int:
    raw = gp.scaled(base)
    if raw < 1:
        raise ParameterError(
            f"{table}: sf={gp.sf} / scale_divisor={gp.scale_divisor} leaves fewer than one member"
        )
    return math.ceil(raw)


def generate_dimensions(gp: GenParams) -> DimensionSet:
    """
    Synthesize dimension members in place of TPC-H dbgen flat files.

    The result is a deterministic function of (sf, scale_divisor, seed).

    Args:
        gp: Generation parameters

    Returns:
        DimensionSet with 5 regions, 25 nations, scaled customers, parts and
        suppliers, and every day from 1998-01-01 to 2004-12-31
    """
    part_count = cardinality(gp, PART_BASE, "parts")
    customer_count = cardinality(gp, CUSTOMER_BASE, "customers")
    supplier_count = cardinality(gp, SUPPLIER_BASE, "suppliers")

    dims = DimensionSet()
    for key, name in enumerate(REGIONS):
        dims.regions[key] = Region(key, name)
    for key, (name, regionkey) in enumerate(NATIONS):
        dims.nations[key] = Nation(key, name, regionkey)

    rng = stream(gp.seed, "parts")
    for key in range(1, part_count + 1):
        dims.parts[key] = _part(rng, key)

    rng = stream(gp.seed, "customers")
    for key in range(1, customer_count + 1):
        dims.customers[key] = Customer(
            custkey=key,
            name=f"Customer#{key:09d}",
            acctbal=cents(rng.randint(ACCTBAL_MIN_CENTS, ACCTBAL_MAX_CENTS)),
            mktsegment=rng.choice(MARKET_SEGMENTS),
            nationkey=rng.randrange(len(NATIONS)),
        )

    rng = stream(gp.seed, "suppliers")
    for key in range(1, supplier_count + 1):
        dims.suppliers[key] = Supplier(
            suppkey=key,
            name=f"Supplier#{key:09d}",
            acctbal=cents(rng.randint(ACCTBAL_MIN_CENTS, ACCTBAL_MAX_CENTS)),
            nationkey=rng.randrange(len(NATIONS)),
        )

    _fill_calendar(dims)

    logger.info(
        "generated dimensions: %d parts, %d customers, %d suppliers, %d days",
        part_count, customer_count, supplier_count, len(dims.days),
    )
    return dims


def _part(rng: random.Random, key: int) -> Part:
    first, second = rng.sample(COLORS, 2)
    return Part(
        partkey=key,
        name=f"{first} {second}",
        brand=f"Brand#{rng.randint(1, 5)}{rng.randint(1, 5)}",
        retailprice=retail_price(key),
        size=rng.randint(1, 50),
    )


def _fill_calendar(dims: DimensionSet) -> None:
    day = FIRST_DAY
    while day <= LAST_DAY:
        if day.year not in dims.years:
            dims.years[day.year] = Year(day.year)
        month_key = day.year * 100 + day.month
        if month_key not in dims.months:
            dims.months[month_key] = Month(
                key=month_key,
                monthkey=day.month,
                monthname=MONTH_NAMES[day.month - 1],
                yearkey=day.year,
            )
        datekey = day.year * 10000 + day.month * 100 + day.day
        dims.days[datekey] = Day(datekey=datekey, dayname=DAY_NAMES[day.weekday()], month=month_key)
        day += timedelta(days=1)
