# type: ignore
import os
import pytest


@pytest.fixture(autouse=True)
def _existing_cwd(request):
    """fx.test_teardown removes the directory fx.test_setup chdir'ed into; biobb_common needs a valid cwd."""
    try:
        os.getcwd()
    except FileNotFoundError:
        os.chdir(str(request.config.rootpath))
    yield
