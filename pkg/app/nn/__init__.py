"""Numpy layers, CRF, seq2seq and training loop."""
