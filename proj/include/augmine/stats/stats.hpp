// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "augmine/common.hpp"

namespace augmine::stats {

class AllZeroDifferences : public Error {
  public:
    using Error::Error;
};

class DegenerateTable : public Error {
  public:
    using Error::Error;
};

class LengthMismatch : public Error {
  public:
    using Error::Error;
};

struct PairedSamples {
    std::vector<double> a;
    std::vector<double> b;
    std::vector<std::string> keys; // optional pairing labels, same length
};

struct WilcoxonResult {
    double statistic = 0; // min(W+, W-)
    double p_value = 1;
    bool exact = false; // enumeration for n <= 12, normal approximation above
};

// Two-sided Wilcoxon signed-rank test. Zero differences are dropped; ties
// in |difference| get average ranks. Exact p-values enumerate all sign
// vectors; the large-sample path uses the tie-corrected normal
// approximation without a continuity correction.
WilcoxonResult wilcoxon_signed_rank(const PairedSamples& samples);
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b);

struct ChiSquareResult {
    double statistic = 0;
    double p_value = 1;
};

// 2x2 chi-squared with the Yates correction, |O-E|-0.5 floored at zero.
// Cells are row-major: [[a, b], [c, d]].
ChiSquareResult chi_square_yates(long long a, long long b, long long c, long long d);

// Inter-rater agreement; returns 1 on perfect agreement even when the
// chance term degenerates.
double cohens_kappa(const std::vector<std::string>& ratings_a,
                    const std::vector<std::string>& ratings_b);

struct ConfusionCounts {
    long long tp = 0;
    long long fp = 0;
    long long tn = 0;
    long long fn = 0;
};

struct PrecisionRecall {
    double precision = 0;
    double recall = 0;
    bool precision_defined = true; // false when tp+fp = 0
    bool recall_defined = true;    // false when tp+fn = 0
};

PrecisionRecall precision_recall(const ConfusionCounts& c);

// Upper regularized incomplete gamma Q(a, x); the chi-squared p-value with
// one degree of freedom is Q(1/2, statistic/2).
double gamma_q(double a, double x);

} // namespace augmine::stats
