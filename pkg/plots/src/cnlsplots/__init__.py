"""Diagnostic figures rendered from cnlslab output files.

A read-only consumer of the documented CSV, JSON and binary-field
artifacts; no simulation quantities are recomputed here.  One script per
figure kind, each with the common flags --in, --out, --dpi, and each
rendering byte-identically from identical inputs.
"""

__version__ = "0.1.0"
