import pytest

from incgreen.geometry import Inclusion, Material, Scenario


@pytest.fixture
def unit_disk():
    return Scenario(1.0, Material(1.0), ())


@pytest.fixture
def single_inclusion():
    # order-one moduli keep numerical floors far below the physics
    return Scenario(10.0, Material(1.0),
                    (Inclusion((2.0, -1.0), 1.0, Material(3.0)),),
                    epsilon=0.2)


@pytest.fixture
def three_inclusions():
    return Scenario(10.0, Material(1.0), (
        Inclusion((-4.0, 0.0), 1.0, Material(3.0)),
        Inclusion((2.0, 3.5), 0.8, Material(0.2)),
        Inclusion((2.5, -3.0), 0.9, Material(5.0)),
    ))
