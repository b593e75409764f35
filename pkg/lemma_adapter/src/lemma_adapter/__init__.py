"""Lemmatizer adapter: raw text in, token/lemma JSON Lines out."""

from .adapter import AdapterError, DOCUMENT_SCHEMA, Summary, lemmatize_file, lemmatize_text

__version__ = "0.1.0"
__all__ = ["AdapterError", "DOCUMENT_SCHEMA", "Summary", "lemmatize_file", "lemmatize_text"]
