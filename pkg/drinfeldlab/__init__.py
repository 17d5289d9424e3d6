"""DrinfeldLab: exact heights and discriminants for Drinfeld modules over F_q(T)."""

__version__ = "0.1.0"
