from mps2cl.cli import main

__all__ = ['main']
