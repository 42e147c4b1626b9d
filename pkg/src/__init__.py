# ncp4 - Source Package
__version__ = "0.1.0"
