"""Test suite for the metaplectic theta toolkit."""
