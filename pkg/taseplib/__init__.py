"""This is the top-level module of ``taseplib``."""
