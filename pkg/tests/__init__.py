"""Tests for epbeam."""
