"""Lexicon and machine-learning sentiment analysis for Persian reviews."""

__version__ = "0.1.0"
