import pytest

from std2d.config import config_from_dict


@pytest.fixture
def make_config():
    """Factory for small, fast scenario configs with overridable fields."""

    def _make(**overrides):
        data = {
            "n_devices": 120,
            "file_bits": 100_000,
            "variant": "std2d",
            "seed": 1,
        }
        adversary = overrides.pop("adversary", None)
        data.update(overrides)
        if adversary is not None:
            data["adversary"] = adversary
        return config_from_dict(data)

    return _make
