"""Sphinx configuration of the fluxsim documentation."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path("..").resolve()))

from fluxsim import __version__  # noqa: E402

project = "fluxsim"
copyright = "2026, fluxsim developers"  # noqa: A001
author = "fluxsim developers"
release = __version__

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosectionlabel",
    "sphinx.ext.mathjax",
]

autodoc_member_order = "bysource"
autodoc_typehints = "description"
autosectionlabel_prefix_document = True

exclude_patterns = ["_build"]

html_theme = "sphinx_rtd_theme"
html_title = f"fluxsim {release}"
