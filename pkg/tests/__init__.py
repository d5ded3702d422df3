"""MPCA test suite"""
