"""Ordered/linear call-by-push-value calculi with allocation effects.

Library layout:

- syntax: type and term trees, substitution, desugaring
- surface: parser and pretty printer for .ord / .afn files
- typecheck: ordered/linear checker, runtime and stack/command typing
- machine: small-step abstract machine over commands
- resources: resource-list and resource-multiset judgments
- affine: checker for the affine dialect (drop/move/raise/try)
- elaborate: translation of affine programs into the core calculus
- generate: seeded well-typed term generation
- verify: metatheorem test matrix over the corpus
- cli: the `ordlin` command-line driver
"""

__version__ = "0.1.0"
