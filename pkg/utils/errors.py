"""
Root of the toolkit's exception hierarchy.
Concrete errors are declared next to the code that raises them.
"""


class Cs3Error(Exception):
    """Base class for every error raised by cs3kit"""
