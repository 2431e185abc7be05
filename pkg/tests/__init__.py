"""Tests for parahilb."""
