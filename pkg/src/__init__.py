"""
RTF Verify - Numerical verification of a relative trace formula for level-1 cusp forms

Compares the spectral side (harmonic second moment of central L-values) with the
geometric side (closed-form main term plus hypergeometric error series).

Changelog
v0.2.2 - 10/17/2026 - 2F1 gradient without raw Pochhammer products, extended re-summation of cancelling series,
                       Euler-Maclaurin zeta on Re s = 1, double-double from weight 20, --version
v0.2.1 - 10/12/2026 - Error-series signs reconciled with the orbital integrals at k = 2 mod 4
v0.2.0 - 09/28/2026 - Double-double backend, scan workers, CSV reports
v0.1.0 - 09/02/2026 - Initial spectral and geometric pipelines
"""

__version__ = "0.2.2"
__author__ = "William Craig @ 4AM365"
