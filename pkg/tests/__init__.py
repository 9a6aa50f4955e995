"""
Test suite for Media Ripper
"""
