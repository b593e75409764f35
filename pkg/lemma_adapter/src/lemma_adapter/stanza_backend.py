"""Stanza-backed lemmatizer pipeline for Ancient Greek (and friends).

The model version is pinned in models.lock and echoed into output metadata;
a version drift is reported but not fatal, since the caller may knowingly
run a newer model.
"""

from __future__ import annotations

import json
import sys
from importlib import resources
from pathlib import Path

from .adapter import AdapterError

INSTALL_HINT = (
    "the stanza backend is not available. Install it with `pip install stanza` "
    "and fetch the language model once with "
    "`python -c \"import stanza; stanza.download('{model_id}')\"`"
)


def load_lock() -> dict:
    lock_path = resources.files("lemma_adapter") / "models.lock"
    return json.loads(Path(str(lock_path)).read_text(encoding="utf-8"))


class StanzaPipeline:
    """Adapter around stanza.Pipeline producing (surface, lemma) pairs."""

    def __init__(self, model_id: str = "grc"):
        lock = load_lock()
        if model_id not in lock:
            raise AdapterError(
                f"model {model_id!r} is not in models.lock; known: {sorted(lock)}"
            )
        pin = lock[model_id]
        try:
            import stanza
        except ImportError as exc:
            raise AdapterError(INSTALL_HINT.format(model_id=model_id)) from exc
        if stanza.__version__ != pin["stanza_version"]:
            print(
                f"warning: stanza {stanza.__version__} differs from pinned "
                f"{pin['stanza_version']}; output metadata records the running version",
                file=sys.stderr,
            )
        try:
            self._pipeline = stanza.Pipeline(
                lang=model_id,
                processors=pin["processors"],
                package=pin["package"],
                download_method=None,  # never download implicitly; models are fetched once, explicitly
                verbose=False,
            )
        except Exception as exc:  # stanza raises bare Exception subclasses on missing resources
            raise AdapterError(
                f"could not load the {model_id!r} stanza model ({exc}); "
                + INSTALL_HINT.format(model_id=model_id)
            ) from exc
        self.model_id = model_id
        self.model_version = f"stanza-{stanza.__version__}/{pin['package']}"

    def __call__(self, text: str):
        if not text.strip():
            return []
        doc = self._pipeline(text)
        pairs = []
        for sentence in doc.sentences:
            for word in sentence.words:
                pairs.append((word.text, word.lemma or ""))
        return pairs
