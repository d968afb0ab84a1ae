"""MWE-aware English to Indian-language to Bharati Braille preprocessing.

Modules, in pipeline order: :mod:`treebank`, :mod:`transfer`, :mod:`mwe`,
:mod:`subword`, :mod:`braille`; :mod:`evalmetrics` scores outputs and
:mod:`pipeline` / :mod:`cli` tie everything together.
"""

__version__ = "0.1.0"
