"""
EPSFTA Configuration

Default configuration for the EPS reliability workbench.
Values come from the environment (a ``.env`` file in the working directory
is loaded first); command-line flags override them.

``EPSFTA_CONFIG`` picks the configuration class (``default``,
``development`` or ``testing``); ``EPSFTA_DEBUG=true`` alone selects
``development``.
"""
import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

DATA_DIR = Path(__file__).resolve().parent / 'data'


def _env_float(name, default):
    value = os.environ.get(name)
    return float(value) if value else default


class EpsftaConfig:
    """Base configuration for the workbench."""

    # Failure-rate output unit: failures per RATE_SCALE hours
    RATE_SCALE = _env_float('EPSFTA_RATE_SCALE', 1e6)

    # Caps for the exhaustive methods
    EXACT_EVENT_LIMIT = 20
    ENUMERATION_EVENT_LIMIT = 24

    # Simulation step: one second, in hours
    DEFAULT_DT_HOURS = 1.0 / 3600.0

    LOG_LEVEL = os.environ.get('EPSFTA_LOG_LEVEL', 'WARNING').upper()

    # Log a traceback with every reported error
    DEBUG = os.environ.get('EPSFTA_DEBUG', 'false').lower() == 'true'

    # Provenance timestamps in reports
    INCLUDE_TIMESTAMP = True


class DevelopmentConfig(EpsftaConfig):
    """Development configuration with verbose logging."""
    DEBUG = True
    LOG_LEVEL = os.environ.get('EPSFTA_LOG_LEVEL', 'INFO').upper()


class TestingConfig(EpsftaConfig):
    """Golden-output configuration: no timestamps in provenance."""
    INCLUDE_TIMESTAMP = False


CONFIGS = {
    'default': EpsftaConfig,
    'development': DevelopmentConfig,
    'testing': TestingConfig,
}


def select_config(name=None):
    """Configuration class from a name, ``EPSFTA_CONFIG`` or ``EPSFTA_DEBUG``.

    Raises:
        KeyError: unknown configuration name
    """
    name = name or os.environ.get('EPSFTA_CONFIG', '')
    if not name:
        debug = os.environ.get('EPSFTA_DEBUG', 'false').lower() == 'true'
        name = 'development' if debug else 'default'
    return CONFIGS[name.lower()]


def component_library_path(override=None):
    """Library path from override arg, environment, or the bundled file."""
    if override:
        return override
    return os.environ.get('EPSFTA_COMPONENT_LIBRARY') or str(DATA_DIR / 'components.yaml')


def risk_config_path(override=None):
    """Risk threshold file from override arg or environment ('' if unset)."""
    if override:
        return override
    return os.environ.get('EPSFTA_RISK_CONFIG', '')


def bundled_file(name):
    """Path of a bundled data file, accepting the name with or without .yaml."""
    candidate = DATA_DIR / name
    if candidate.suffix not in ('.yaml', '.yml'):
        candidate = candidate.with_suffix('.yaml')
    return candidate if candidate.exists() else None
