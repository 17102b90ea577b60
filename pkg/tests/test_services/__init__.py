"""Tests for service layer."""
