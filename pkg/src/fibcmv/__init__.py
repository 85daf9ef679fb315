"""Fibonacci quantum walks, CMV matrices and Lee-Yang zeros of Fibonacci Ising rings."""

__version__ = "0.1.0"
