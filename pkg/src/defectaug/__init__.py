"""Human-guided defect image augmentation toolkit.

Composes expert-drawn defect sketches onto background images, embeds
real and generated images with exact t-SNE, curates the generated set
by nearest-real distance thresholding plus human review, and scores
external classifier predictions.
"""

__version__ = "0.1.0"
