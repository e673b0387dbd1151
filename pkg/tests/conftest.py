import pytest

from shadowevap.config import default_config

# Measured per-wafer entries: (wafer_id, area_class um^2, R_N ohm, J_c uA/um^2).
# Wafers 3-5 are the internally consistent set; wafers 1-2 carry R_N rounded
# to two significant figures and serve as data-quality outliers.
WAFER_TABLE = [
    ("w1", 0.025, 20000.0, 0.50),
    ("w1", 0.090, 8000.0, 0.51),
    ("w2", 0.025, 18000.0, 0.46),
    ("w2", 0.090, 5300.0, 0.47),
    ("w3", 0.025, 2600.0, 5.61),
    ("w3", 0.090, 700.0, 5.80),
    ("w4", 0.025, 3200.0, 4.71),
    ("w4", 0.090, 900.0, 4.56),
    ("w5", 0.025, 13000.0, 1.12),
    ("w5", 0.090, 3300.0, 1.15),
]

CONSISTENT_WAFERS = ("w3", "w4", "w5")


@pytest.fixture
def config():
    return default_config()
