"""Reported LM statistics and specification choices for the 28-region study.

Each entry: (lm_lag, rlm_lag, lm_err, rlm_err, expected choice).
"""

REPORTED_LM = {
    ("Agriculture", (1995, 1999)): (0.416, 7.111, 8.774, 15.469, "ERROR"),
    ("Industry", (1995, 1999)): (1.122, 2.317, 0.109, 1.304, "OLS"),
    ("Services", (1995, 1999)): (4.749, 1.987, 3.607, 0.846, "LAG"),
    ("Total", (1995, 1999)): (0.008, 0.087, 0.069, 0.149, "OLS"),
    ("Agriculture", (2000, 2005)): (0.771, 0.030, 0.940, 0.198, "OLS"),
    ("Industry", (2000, 2005)): (8.742, 4.366, 4.444, 0.068, "LAG"),
    ("Services", (2000, 2005)): (5.976, 1.998, 4.102, 0.124, "LAG"),
    ("Total", (2000, 2005)): (5.215, 1.146, 9.462, 5.393, "ERROR"),
}


def lm_from_reported(values):
    from verdoorn.ols import LMTests, TestStat

    lm_lag, rlm_lag, lm_err, rlm_err = values[:4]
    return LMTests(TestStat.chi2(lm_lag, 1), TestStat.chi2(lm_err, 1),
                   TestStat.chi2(rlm_lag, 1), TestStat.chi2(rlm_err, 1))
