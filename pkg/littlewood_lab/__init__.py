"""littlewood-lab: numerical audits of Rudin-Shapiro, Fekete and Littlewood polynomials."""

__version__ = "0.1.0"
