"""Shared pytest configuration."""

import logging

import pytest


@pytest.fixture(autouse=True)
def reset_package_logger():
    """Undo handler changes made by configure_logging in CLI tests."""
    yield
    logger = logging.getLogger("epbeam")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    logger.propagate = True
    logger.setLevel(logging.NOTSET)
