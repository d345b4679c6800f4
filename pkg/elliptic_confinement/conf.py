"""Library settings."""

import os
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional, Union

from dotenv import load_dotenv

DEFAULT_SETTINGS: Dict[str, Union[int, float, str]] = {
    'GEOMETRY_TOLERANCE': 1e-10,
    'MARGIN_THRESHOLD': 1e-9,
    'SAMPLES': 10000,
    'REFINE_COUNT': 16,
    'REFINE_BUDGET': 200,
    'SHELL_INNER': 1.001,
    'HALFSPACE_CLEARANCE': 1e-3,
    'SYMMETRY_BAND': 1e-6,
    'NEWTON_TOLERANCE': 1e-10,
    'NEWTON_MAX_ITERATIONS': 200,
    'NEWTON_MAX_HALVINGS': 30,
    'STEADY_TOLERANCE': 1e-10,
    'RELAX_MAX_STEPS': 20000,
    'TIME_STEP_SAFETY': 4.0,
    'MONITOR_TOLERANCE': 1e-9,
    'P_FUNCTION_TOLERANCE': 1e-8,
    'TOUCH_TOLERANCE': 1e-9,
    'CORE_FRACTION': 0.5,
    'CONFINEMENT_KAPPA': 1.0,
    'OUTPUT_DIR': 'results',
}
ENVIRONMENT_PREFIX = 'ELLIPTIC_CONFINEMENT_'


def get_environment_settings() -> Dict[str, Union[int, float, str]]:
    """Return settings overridden through `ELLIPTIC_CONFINEMENT_*` variables.

    Values are converted to the type of the corresponding default,
    unknown names are ignored.
    """
    load_dotenv(override=False)
    user_settings: Dict[str, Union[int, float, str]] = {}
    for name, default in DEFAULT_SETTINGS.items():
        raw = os.getenv(f'{ENVIRONMENT_PREFIX}{name}')
        if raw is None:
            continue
        try:
            user_settings[name] = type(default)(raw)
        except ValueError as error:
            raise ValueError(
                f'Invalid value `{raw}` for the `{ENVIRONMENT_PREFIX}{name}` variable',
            ) from error
    return user_settings


class Settings:
    """Library settings.

    Settings consist of defaults that can be overridden
    with environment variables or, in tests, with `override_settings`.
    """

    def __init__(self, user_settings: Optional[dict] = None) -> None:
        self._user_settings = user_settings

    @property
    def user_settings(self) -> dict:
        """Return user-defined settings."""
        if self._user_settings is None:
            self._user_settings = get_environment_settings()
        return self._user_settings

    def __getattr__(self, name: str) -> Union[int, float, str]:
        """Return a setting value."""
        if name not in DEFAULT_SETTINGS:
            raise AttributeError(f'Invalid elliptic-confinement setting: `{name}`')
        if name in self.user_settings:
            return self.user_settings[name]
        return DEFAULT_SETTINGS[name]


settings = Settings(None)


def reload_settings(user_settings: Optional[dict] = None) -> None:
    """Rebuild the settings object, re-reading the environment if nothing is given."""
    global settings
    settings = Settings(user_settings)


@contextmanager
def override_settings(**values: Any) -> Iterator[None]:
    """Temporarily override settings."""
    global settings
    previous = settings
    unknown = set(values) - set(DEFAULT_SETTINGS)
    if unknown:
        raise AttributeError(f'Invalid elliptic-confinement settings: {sorted(unknown)}')
    settings = Settings({**previous.user_settings, **values})
    try:
        yield
    finally:
        settings = previous
