"""Exact calculus for commuting ordinary differential operators."""
