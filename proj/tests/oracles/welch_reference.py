"""Prints the Welch t-test reference table frozen into the acceptance suite.

Computed with scipy.stats.ttest_ind(equal_var=False), two-sided.
"""
from scipy import stats

PAIRS = [
    ([1, 2, 3, 4, 5], [2, 3, 4, 5, 6]),
    ([0, 0, 0, 0], [10, 10, 10, 10.0001]),
    ([1.1, 2.3, 1.9, 3.4, 2.2, 2.8], [3.1, 4.2, 3.9, 5.0]),
    ([10, 12, 9, 11, 13, 10, 12], [10, 11, 12, 9, 10, 13, 11]),
    ([0.5, 0.7, 0.2], [0.9, 1.4, 1.1, 0.8, 1.3, 1.2, 1.0, 0.95]),
    ([3, 3, 3, 4], [1, 5, 9, 2, 6, 5, 3]),
    ([100.0, 101.5, 99.2, 100.8, 102.1], [98.0, 97.5, 99.9, 96.3, 98.8, 97.1]),
    ([-2.0, -1.5, -3.1, -2.2], [-1.0, 0.5, -0.3, 0.1, -0.8]),
    ([0.0071, 0.0123, 0.0, 0.0302, 0.0054, 0.0], [0.0041, 0.0, 0.0012, 0.0063, 0.0, 0.0029, 0.0]),
    ([5, 7, 5, 3, 5, 3, 3, 9], [8, 1, 4, 6, 6, 4, 1, 2]),
]

for a, b in PAIRS:
    r = stats.ttest_ind(a, b, equal_var=False)
    print(f"{{{{{', '.join(map(repr, a))}}}, {{{', '.join(map(repr, b))}}}, {float(r.statistic)!r}, {float(r.pvalue)!r}}},")
