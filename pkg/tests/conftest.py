import pytest

from horizontal_tubes.cli import OUTPUT_DIR_ENV


@pytest.fixture(scope="session")
def anyio_backend() -> str:
    """
    Anyio backend.

    Worker-thread sweeps are only exercised on asyncio.
    :return: backend name.
    """
    return "asyncio"


@pytest.fixture(autouse=True)
def clean_output_dir(monkeypatch: pytest.MonkeyPatch) -> None:
    """
    Unset the output directory variable.

    Tests that need it set it again with monkeypatch.
    :param monkeypatch: pytest monkeypatch fixture.
    """
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)
