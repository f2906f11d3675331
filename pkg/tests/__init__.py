"""Test suite for the SCBO package."""
