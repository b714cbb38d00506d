"""Paging policies, exact expected-miss engines and smoothness audits."""

__version__ = "0.1.0"
