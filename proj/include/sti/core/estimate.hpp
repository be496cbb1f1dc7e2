#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sti {

// value + standard error + sample count: the universal return type of
// all Monte Carlo operations
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
    bool exact = false;  // set when the value is analytic, not sampled

    static Estimate exactly(double v, std::int64_t n = 0) { return {v, 0.0, n, true}; }
};

// quadrature combination of independent errors
inline double combine_se(double a, double b) { return std::sqrt(a * a + b * b); }
inline double combine_se(double a, double b, double c) { return std::sqrt(a * a + b * b + c * c); }

// z-score of difference of two independent estimates
inline double z_difference(const Estimate& a, const Estimate& b) {
    double se = combine_se(a.std_error, b.std_error);
    if (se == 0.0) return (a.value == b.value) ? 0.0 : INFINITY;
    return (a.value - b.value) / se;
}

// Kahan compensated accumulator
class Kahan {
  public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double sum() const { return s_; }

  private:
    double s_ = 0.0, c_ = 0.0;
};

// Per-batch sums of a fixed-width vector of accumulators. Estimators are
// functions of the pooled mean vector; errors come from delete-one-batch
// jackknife, which handles ratios and other nonlinear composites and is
// valid under within-sample correlation across components.
class BatchTable {
  public:
    BatchTable(int width, int n_batches)
        : width_(width), sums_(static_cast<std::size_t>(width) * n_batches, 0.0),
          counts_(n_batches, 0) {}

    int width() const { return width_; }
    int batches() const { return static_cast<int>(counts_.size()); }
    std::int64_t total_count() const {
        std::int64_t t = 0;
        for (auto c : counts_) t += c;
        return t;
    }

    double* batch_row(int b) { return sums_.data() + static_cast<std::size_t>(b) * width_; }
    const double* batch_row(int b) const {
        return sums_.data() + static_cast<std::size_t>(b) * width_;
    }
    void add_count(int b, std::int64_t n) { counts_[b] += n; }
    std::int64_t count(int b) const { return counts_[b]; }

    std::vector<double> totals() const {
        std::vector<double> t(width_, 0.0);
        for (int b = 0; b < batches(); ++b)
            for (int j = 0; j < width_; ++j) t[j] += batch_row(b)[j];
        return t;
    }

    // pooled means
    std::vector<double> means() const {
        auto t = totals();
        double n = static_cast<double>(total_count());
        for (auto& x : t) x /= n;
        return t;
    }

  private:
    int width_;
    std::vector<double> sums_;
    std::vector<std::int64_t> counts_;
};

// Delete-one-batch jackknife of f(mean vector).
inline Estimate jackknife(const BatchTable& tab,
                          const std::function<double(std::span<const double>)>& f) {
    const int nb = tab.batches();
    const std::int64_t n = tab.total_count();
    auto tot = tab.totals();
    std::vector<double> m(tab.width());
    for (int j = 0; j < tab.width(); ++j) m[j] = tot[j] / static_cast<double>(n);
    double theta = f(m);
    if (nb < 2) return {theta, 0.0, n, false};

    std::vector<double> leave(nb);
    std::vector<double> mk(tab.width());
    for (int b = 0; b < nb; ++b) {
        double nk = static_cast<double>(n - tab.count(b));
        const double* row = tab.batch_row(b);
        for (int j = 0; j < tab.width(); ++j) mk[j] = (tot[j] - row[j]) / nk;
        leave[b] = f(mk);
    }
    double mbar = 0.0;
    for (double v : leave) mbar += v;
    mbar /= nb;
    double ss = 0.0;
    for (double v : leave) ss += (v - mbar) * (v - mbar);
    double se = std::sqrt(ss * static_cast<double>(nb - 1) / nb);
    return {theta, se, n, false};
}

// simple mean/variance over a series (used by mcmc diagnostics)
struct MeanVar {
    std::int64_t n = 0;
    double mean = 0.0, m2 = 0.0;
    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double se_of_mean() const {
        return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
};

}  // namespace sti
