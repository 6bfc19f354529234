"""Multilingual infodemic tweet classification: models, API, pipeline,
and analytics store."""

__version__ = "0.1.0"
