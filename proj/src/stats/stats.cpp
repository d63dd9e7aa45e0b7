// SPDX-License-Identifier: Apache-2.0
#include "augmine/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace augmine::stats {

namespace {

// doubled ranks of |differences| so average ranks stay integral
std::vector<long long> doubled_ranks(const std::vector<double>& abs_diffs) {
    const std::size_t n = abs_diffs.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return abs_diffs[x] < abs_diffs[y];
    });
    std::vector<long long> ranks(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && abs_diffs[order[j + 1]] == abs_diffs[order[i]]) ++j;
        // positions i+1 .. j+1 (1-based), average doubled = (i+1) + (j+1)
        long long doubled = static_cast<long long>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = doubled;
        i = j + 1;
    }
    return ranks;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b) {
    PairedSamples s;
    s.a = a;
    s.b = b;
    return wilcoxon_signed_rank(s);
}

WilcoxonResult wilcoxon_signed_rank(const PairedSamples& samples) {
    if (samples.a.size() != samples.b.size() || samples.a.empty()) {
        throw LengthMismatch("wilcoxon: paired samples must have equal nonzero length");
    }
    std::vector<double> abs_diffs;
    std::vector<bool> positive;
    for (std::size_t i = 0; i < samples.a.size(); ++i) {
        double d = samples.a[i] - samples.b[i];
        if (d == 0.0) continue;
        abs_diffs.push_back(std::fabs(d));
        positive.push_back(d > 0.0);
    }
    const std::size_t n = abs_diffs.size();
    if (n == 0) {
        throw AllZeroDifferences("wilcoxon: all paired differences are zero");
    }

    std::vector<long long> ranks2 = doubled_ranks(abs_diffs);
    long long w_plus2 = 0;
    long long total2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total2 += ranks2[i];
        if (positive[i]) w_plus2 += ranks2[i];
    }
    long long w_minus2 = total2 - w_plus2;
    long long t2 = std::min(w_plus2, w_minus2);

    WilcoxonResult result;
    result.statistic = static_cast<double>(t2) / 2.0;

    if (n <= 12) {
        result.exact = true;
        long long hits = 0;
        const std::uint64_t count = 1ull << n;
        for (std::uint64_t mask = 0; mask < count; ++mask) {
            long long w2 = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if ((mask >> i & 1) != 0) w2 += ranks2[i];
            }
            if (w2 <= t2 || w2 >= total2 - t2) ++hits;
        }
        result.p_value = static_cast<double>(hits) / static_cast<double>(count);
    } else {
        result.exact = false;
        double nn = static_cast<double>(n);
        double mean = nn * (nn + 1.0) / 4.0;
        double variance = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
        // tie correction: subtract sum(t^3 - t)/48 per tie group
        std::map<long long, long long> groups;
        for (long long r : ranks2) ++groups[r];
        for (const auto& [rank, size] : groups) {
            double t = static_cast<double>(size);
            variance -= (t * t * t - t) / 48.0;
        }
        double w = static_cast<double>(t2) / 2.0;
        double z = (w - mean) / std::sqrt(variance);
        double p = 2.0 * normal_cdf(z); // w is the smaller sum, so z <= 0
        result.p_value = std::min(1.0, std::max(0.0, p));
    }
    return result;
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) {
        throw std::invalid_argument("gamma_q: requires a > 0 and x >= 0");
    }
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        // lower series, Q = 1 - P
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 2000; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-14) break;
        }
        double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        return std::min(1.0, std::max(0.0, 1.0 - p));
    }
    // upper continued fraction (modified Lentz)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 2000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-14) break;
    }
    double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    return std::min(1.0, std::max(0.0, q));
}

ChiSquareResult chi_square_yates(long long a, long long b, long long c, long long d) {
    if (a < 0 || b < 0 || c < 0 || d < 0) {
        throw DegenerateTable("chi-squared: negative cell");
    }
    const double n = static_cast<double>(a + b + c + d);
    const double row1 = static_cast<double>(a + b);
    const double row2 = static_cast<double>(c + d);
    const double col1 = static_cast<double>(a + c);
    const double col2 = static_cast<double>(b + d);
    if (row1 == 0 || row2 == 0 || col1 == 0 || col2 == 0) {
        throw DegenerateTable("chi-squared: zero margin");
    }

    const double observed[4] = {static_cast<double>(a), static_cast<double>(b),
                                static_cast<double>(c), static_cast<double>(d)};
    const double expected[4] = {row1 * col1 / n, row1 * col2 / n, row2 * col1 / n,
                                row2 * col2 / n};
    ChiSquareResult result;
    for (int i = 0; i < 4; ++i) {
        double dev = std::max(std::fabs(observed[i] - expected[i]) - 0.5, 0.0);
        result.statistic += dev * dev / expected[i];
    }
    result.p_value = gamma_q(0.5, result.statistic / 2.0);
    return result;
}

double cohens_kappa(const std::vector<std::string>& ratings_a,
                    const std::vector<std::string>& ratings_b) {
    if (ratings_a.size() != ratings_b.size() || ratings_a.empty()) {
        throw LengthMismatch("kappa: ratings must have equal nonzero length");
    }
    const double n = static_cast<double>(ratings_a.size());
    std::size_t agreements = 0;
    std::map<std::string, long long> count_a, count_b;
    for (std::size_t i = 0; i < ratings_a.size(); ++i) {
        if (ratings_a[i] == ratings_b[i]) ++agreements;
        ++count_a[ratings_a[i]];
        ++count_b[ratings_b[i]];
    }
    double p_o = static_cast<double>(agreements) / n;
    if (agreements == ratings_a.size()) return 1.0;
    double p_e = 0.0;
    for (const auto& [label, ca] : count_a) {
        auto it = count_b.find(label);
        if (it == count_b.end()) continue;
        p_e += (static_cast<double>(ca) / n) * (static_cast<double>(it->second) / n);
    }
    return (p_o - p_e) / (1.0 - p_e);
}

PrecisionRecall precision_recall(const ConfusionCounts& c) {
    PrecisionRecall result;
    if (c.tp + c.fp > 0) {
        result.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    } else {
        result.precision_defined = false;
    }
    if (c.tp + c.fn > 0) {
        result.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    } else {
        result.recall_defined = false;
    }
    return result;
}

} // namespace augmine::stats
