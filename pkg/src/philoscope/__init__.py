"""philoscope: translation-quality scoring and terminology-rarity analysis toolkit.

Core pieces:

- corpus: lemma-frequency index with Zipf-scale queries
- rarity: per-passage rarity profiles and translation-risk flags
- mqm: severity-weighted quality scores (TQS), rating schemes, aggregation
- lexmetrics: native BLEU-4 / chrF++ / ROUGE-L with multi-reference support
- stats: correlations with Fisher-z CIs, OLS with Cook's distance, bootstrap
- dataset: the bundled fixture tables, validation, and joins
- report: the analysis tables rendered as Markdown/CSV
"""

__version__ = "0.1.0"
