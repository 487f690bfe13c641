import pytest

from shannon2d.generator import GeneratorSpec
from shannon2d.pairing import SPIRAL, PairingSpec, load_table, save_table

TABLE_SIZE = 4096


@pytest.fixture(scope="session")
def table_path(tmp_path_factory):
    """A loaded bijection: the boustrophedon enumeration saved as a finite table."""
    path = tmp_path_factory.mktemp("tables") / "boustrophedon.json"
    save_table(PairingSpec("boustrophedon"), TABLE_SIZE, path)
    return path


@pytest.fixture(scope="session")
def table_pairing(table_path):
    return load_table(table_path)


@pytest.fixture(scope="session", params=["spiral", "table"])
def any_spec(request, table_pairing):
    pairing = SPIRAL if request.param == "spiral" else table_pairing
    return GeneratorSpec(pairing)


@pytest.fixture(scope="session")
def spiral_spec():
    return GeneratorSpec(SPIRAL)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
