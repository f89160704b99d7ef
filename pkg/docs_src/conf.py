# Configuration file for the Sphinx documentation builder.
#
# This file only contains a selection of the most common options. For a full
# list see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Path setup --------------------------------------------------------------

import os
import sys

# autodoc imports the modules from src/
sys.path.insert(0, os.path.abspath("../src/"))


# -- Project information -----------------------------------------------------

project = "seqrank: Exact Sequence Ranks"
copyright = "2025, seqrank developers"
author = "seqrank developers"

# The full version, including alpha/beta/rc tags
release = "0.1"


# -- General configuration ---------------------------------------------------
extensions = [
    "myst_parser",
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.intersphinx",
    "sphinx_design",
]

autodoc_member_order = "bysource"
autodoc_default_options = {"members": True, "undoc-members": False}
napoleon_google_docstring = True

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
}

myst_enable_extensions = [
    "amsmath",
    "colon_fence",
    "deflist",
    "dollarmath",
    "fieldlist",
    "substitution",
]
myst_url_schemes = ["mailto", "http", "https"]
numfig = True
pygments_style = "sphinx"
suppress_warnings = ["myst.domains"]

# Add any paths that contain templates here, relative to this directory.
templates_path = ["_templates"]

exclude_patterns = [
    ".DS_Store",
    "Thumbs.db",
    "_build",
]

## For including date and time in MyST
today_fmt = "%c"


# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_book_theme"

html_theme_options = {
    "navigation_with_keys": True,
    "search_bar_text": "Search the docs...",
    "path_to_docs": "docs_src",
    "repository_branch": "master",
    "extra_footer": "",
    "home_page_in_toc": True,
    "announcement": "",
    "use_repository_button": False,
    "use_edit_page_button": False,
    "use_issues_button": False,
}
html_title = "seqrank"

html_sidebars = {
    "**": [
        "navbar-logo.html",
        "icon-links.html",
        "search-button-field.html",
        "sbt-sidebar-nav.html",
    ]
}

##########################
## Jinja Substitutions
##########################
myst_substitutions = {
    "exit_codes": "0 certified, 1 usage or input error, 2 repeated root, "
    "3 no rank within the prefix (or a zero root), 4 non-integer masses, 5 disagreement",
}
