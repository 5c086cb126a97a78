#include <catch2/catch_amalgamated.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>

#include "cellsched/workload.hpp"
#include "oracles.hpp"

using namespace cellsched;
using Catch::Approx;

namespace {

// Constant-output generator for pinning a sampler's uniform draw.
struct FixedBits {
    using result_type = std::uint64_t;
    std::uint64_t bits;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return bits; }
};

ParetoMixture single(double m, double alpha) { return {{{1.0, m}}, alpha}; }

}  // namespace

TEST_CASE("interarrival inverse CDF", "[workload]") {
    // u = 1 is the boundary of (0, 1]: zero duration
    CHECK(exponential_from_uniform(1.0, 0.09) == 0.0);
    CHECK(exponential_from_uniform(std::exp(-0.09 * 10.0), 0.09) == Approx(10.0).epsilon(1e-12));

    // all-ones word maps to u = 1
    FixedBits top{~std::uint64_t{0}};
    CHECK(sample_interarrival(top, 0.09) == 0.0);
    FixedBits low{0};
    CHECK(sample_interarrival(low, 0.09) > 0.0);
}

TEST_CASE("interarrival rejects non-positive rates", "[workload]") {
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(sample_interarrival(rng, 0.0), ParameterError);
    CHECK_THROWS_AS(sample_interarrival(rng, -1.0), ParameterError);
}

TEST_CASE("interarrival empirical mean is 1/lambda", "[workload][mc]") {
    std::mt19937_64 rng(2024);
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += sample_interarrival(rng, 0.09);
    CHECK(sum / n == Approx(1.0 / 0.09).margin(0.1));
}

TEST_CASE("pareto inverse CDF", "[workload]") {
    CHECK(pareto_from_uniform(std::nextafter(1.0, 0.0), 500.0, 5.5) == Approx(500.0).epsilon(1e-12));
    CHECK(pareto_from_uniform(std::pow(2.0, -5.5), 500.0, 5.5) == Approx(1000.0).epsilon(1e-12));
}

TEST_CASE("file sizes respect the component lower bound", "[workload]") {
    std::mt19937_64 rng(5);
    const auto mix = single(500.0, 5.5);
    for (int i = 0; i < 10000; ++i) CHECK(sample_file_size(rng, mix) >= 500.0);
}

TEST_CASE("mixture file-size mean matches the analytic mean", "[workload][mc]") {
    std::mt19937_64 rng(77);
    const auto mix = ParetoMixture::reference();
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += sample_file_size(rng, mix);
    CHECK(sum / n == Approx(15827.8).epsilon(0.01));
}

TEST_CASE("invalid mixtures are rejected", "[workload]") {
    std::mt19937_64 rng(1);
    ParetoMixture bad_sum{{{0.5, 500.0}, {0.4, 5000.0}}, 5.5};
    CHECK_THROWS_AS(sample_file_size(rng, bad_sum), ParameterError);
    ParetoMixture bad_scale{{{1.0, 0.0}}, 5.5};
    CHECK_THROWS_AS(sample_file_size(rng, bad_scale), ParameterError);
    ParetoMixture bad_weight{{{1.5, 500.0}, {-0.5, 10.0}}, 5.5};
    CHECK_THROWS_AS(sample_file_size(rng, bad_weight), ParameterError);
    CHECK_THROWS_AS(sample_file_size(rng, single(500.0, 1.0)), ParameterError);
}

TEST_CASE("mixture mean", "[workload]") {
    CHECK(mixture_mean(single(500.0, 5.5)) == Approx(611.11).margin(0.01));
    CHECK(mixture_mean(single(1.0, 1e9)) == Approx(1.0).margin(1e-6));
    // hand evaluation: (5.5 / 4.5) * (0.4*500 + 0.3*5000 + 0.2*25000 + 0.1*62500)
    const double hand = 5.5 / 4.5 * 12950.0;
    CHECK(mixture_mean(ParetoMixture::reference()) == Approx(hand).epsilon(1e-14));
    CHECK(hand == Approx(15827.78).margin(0.01));
    CHECK_THROWS_AS(mixture_mean(single(500.0, 1.0)), ParameterError);
    CHECK_THROWS_AS(mixture_mean(single(500.0, 0.5)), ParameterError);
}

TEST_CASE("mean rate support", "[workload]") {
    const double a_bar = 15827.78;
    const auto b = mean_rate_bounds(0.09, a_bar);
    CHECK(mean_rate_from_uniform(0.0, b) == Approx(474.83).margin(0.01));
    CHECK(mean_rate_from_uniform(1.0, b) == Approx(4273.50).margin(0.01));

    std::mt19937_64 rng(99);
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
        const double r = sample_mean_rate(rng, 0.09, a_bar);
        REQUIRE(r >= b.lo);
        REQUIRE(r <= b.hi);
        sum += r;
    }
    CHECK(sum / n == Approx(2374.2).epsilon(0.01));

    CHECK_THROWS_AS(sample_mean_rate(rng, 0.0, a_bar), ParameterError);
    CHECK_THROWS_AS(sample_mean_rate(rng, 0.09, -1.0), ParameterError);
}

TEST_CASE("generate_workload", "[workload]") {
    WorkloadConfig cfg;
    cfg.seed = 3;

    SECTION("zero horizon is empty") {
        cfg.horizon = 0;
        CHECK(generate_workload(cfg).empty());
    }

    SECTION("fixed seed is reproducible") {
        cfg.horizon = 20000;
        CHECK(generate_workload(cfg) == generate_workload(cfg));
        auto other = cfg;
        other.seed = 4;
        CHECK(generate_workload(cfg) != generate_workload(other));
    }

    SECTION("arrival count follows lambda * horizon") {
        cfg.horizon = 100000;
        const auto flows = generate_workload(cfg);
        CHECK(static_cast<double>(flows.size()) == Approx(9000.0).margin(300.0));

        const double min_scale = cfg.size_mixture.min_scale();
        for (std::size_t i = 0; i < flows.size(); ++i) {
            const auto& f = flows[i];
            REQUIRE(f.id == i);
            REQUIRE(f.arrival_slot >= 0);
            REQUIRE(f.arrival_slot < cfg.horizon);
            REQUIRE(f.file_size >= min_scale);
            REQUIRE(f.mean_rate > 0.0);
            if (i) REQUIRE(f.arrival_slot >= flows[i - 1].arrival_slot);
        }
    }

    SECTION("invalid configs are rejected") {
        cfg.lambda = 0.0;
        CHECK_THROWS_AS(generate_workload(cfg), ParameterError);
        cfg.lambda = 0.09;
        cfg.rate_lo_mult = 3.0;
        cfg.rate_hi_mult = 1.0;
        CHECK_THROWS_AS(generate_workload(cfg), ParameterError);
    }
}

TEST_CASE("pareto samples pass Kolmogorov-Smirnov against the analytic CDF", "[workload][mc]") {
    std::mt19937_64 rng(31337);
    const double m = 500.0, alpha = 5.5;
    const auto mix = single(m, alpha);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = sample_file_size(rng, mix);
    const double d = oracle::ks_statistic(xs, [&](double x) { return 1.0 - std::pow(m / x, alpha); });
    CHECK(d < oracle::ks_critical_01(xs.size()));
}

TEST_CASE("truncated pareto density integrates to ~1", "[workload][quadrature]") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> r_dist(1.0, 1e5), a_dist(1.1, 10.0);
    for (int i = 0; i < 20; ++i) {
        const double r = r_dist(rng), alpha = a_dist(rng);
        const double c = alpha * std::pow(r, alpha);
        auto density = [&](double x) { return c / std::pow(x, alpha + 1.0); };
        const double upper = r * std::pow(10.0, 4.0 / alpha);
        const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(density, r, upper, 15, 1e-12);
        CHECK(mass >= 0.999);
        CHECK(mass <= 1.0 + 1e-9);
    }
}
