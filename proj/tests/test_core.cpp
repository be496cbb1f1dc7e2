#include "doctest.h"

#include <cmath>

#include "sti/core/estimate.hpp"
#include "sti/core/rng.hpp"
#include "sti/core/sampling.hpp"

using namespace sti;

TEST_CASE("rng streams are deterministic and distinct") {
    Rng a = Rng::stream(42, 7);
    Rng b = Rng::stream(42, 7);
    Rng c = Rng::stream(42, 8);
    bool same = true, differ = false;
    for (int i = 0; i < 64; ++i) {
        auto x = a.next(), y = b.next(), z = c.next();
        same = same && (x == y);
        differ = differ || (x != z);
    }
    CHECK(same);
    CHECK(differ);
}

TEST_CASE("uniform lies in [0,1), uniform_pos in (0,1)") {
    Rng r(1);
    for (int i = 0; i < 10000; ++i) {
        double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 1000; ++i) CHECK(r.uniform_pos() > 0.0);
}

TEST_CASE("poisson mean and variance, including the splitting branch") {
    Rng r(3);
    for (double mean : {0.5, 7.0, 120.0}) {
        const int n = 20000;
        double s = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            double k = static_cast<double>(r.poisson(mean));
            s += k;
            s2 += k * k;
        }
        double m = s / n;
        double var = s2 / n - m * m;
        double se = std::sqrt(mean / n);
        CHECK(std::abs(m - mean) < 5 * se);
        CHECK(std::abs(var - mean) < 0.1 * mean + 5 * mean * std::sqrt(2.0 / n));
    }
}

TEST_CASE("jackknife of a mean reproduces the classic standard error") {
    BatchTable tab(1, 10);
    double all[40];
    Rng r(5);
    for (int b = 0; b < 10; ++b) {
        double s = 0;
        for (int i = 0; i < 4; ++i) {
            double x = r.uniform();
            all[4 * b + i] = x;
            s += x;
        }
        tab.batch_row(b)[0] = s;
        tab.add_count(b, 4);
    }
    Estimate e = jackknife(tab, [](std::span<const double> m) { return m[0]; });
    double mean = 0;
    for (double x : all) mean += x;
    mean /= 40;
    CHECK(e.value == doctest::Approx(mean));
    CHECK(e.std_error > 0.0);
}

TEST_CASE("run_batched is independent of worker count") {
    SamplePlan p1{9, 100, 5000, 16, 1};
    SamplePlan p4{9, 100, 5000, 16, 4};
    auto fn = [](Rng& rng, double* row) { row[0] = rng.uniform(); };
    auto t1 = run_batched(p1, 1, fn);
    auto t4 = run_batched(p4, 1, fn);
    for (int b = 0; b < t1.batches(); ++b) CHECK(t1.batch_row(b)[0] == t4.batch_row(b)[0]);
}
