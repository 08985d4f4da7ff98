"""paralat: latent-state grammars for lattice-constrained question
paraphrasing, with a toy knowledge-base QA harness.
"""

__version__ = "0.1.0"
