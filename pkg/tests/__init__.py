"""Tests for the Sobolev certificate engine."""
