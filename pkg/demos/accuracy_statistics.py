"""Summaries and significance tests over repeated-run accuracies.

Shows the two statistics entry points on hand-sized samples: reducing a
list of run accuracies to mean and spread, and asking whether two methods
really differ or just bounced around their shared noise floor.

    python3 demos/accuracy_statistics.py
"""

from admmnet.stats import student_t_cdf, summarize, welch_t_test

# Accuracies from two imaginary 8-run studies.  Method A is better on
# average but noisier.
a = [0.82, 0.71, 0.88, 0.79, 0.90, 0.68, 0.85, 0.77]
b = [0.74, 0.76, 0.73, 0.77, 0.75, 0.74, 0.76, 0.75]

for sample in (summarize("method-a", a), summarize("method-b", b)):
    print(f"{sample.method}: mean {sample.mean:.4f}, std {sample.std:.4f}")

# The test does not assume the two spreads are equal; the degrees of
# freedom interpolate between the one-sample extremes.
result = welch_t_test(a, b)
print(f"t = {result.t:.4f}")
print(f"degrees of freedom = {result.df:.2f}")
print(f"two-sided p = {result.p_two_sided:.4f}")
lo, hi = result.ci99
print(f"99% interval for the mean difference: ({lo:.4f}, {hi:.4f})")

# The textbook check case: samples (1,2,3) and (2,3,4) give t = -1.2247
# with 4 degrees of freedom.
check = welch_t_test([1.0, 2.0, 3.0], [2.0, 3.0, 4.0])
print(f"check case: t = {check.t:.4f}, df = {check.df:.1f}")

# The p-values come from an in-repo t distribution; its CDF is symmetric
# and equals one half at zero.
print("cdf(0, df=5) =", student_t_cdf(0.0, 5.0))
print("cdf(-2, df=5) + cdf(2, df=5) =",
      student_t_cdf(-2.0, 5.0) + student_t_cdf(2.0, 5.0))
