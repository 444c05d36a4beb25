#include <doctest.h>

#include <cmath>
#include <set>

#include "abwlab/core.hpp"
#include "abwlab/rng.hpp"

using namespace abw;

TEST_SUITE_BEGIN("core");

TEST_CASE("rate_from_gap matches hand evaluations") {
    CHECK(rate_from_gap(12112, 121.12e-6).mbps() == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(rate_from_gap(12112, 242.24e-6).mbps() == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("doubling the gap halves the rate") {
    RngStream rng(Seed{11});
    for (int i = 0; i < 200; ++i) {
        const std::int64_t l = 64 + static_cast<std::int64_t>(rng.next_below(20000));
        const double g = 1e-6 + rng.next_unit() * 1e-3;
        CHECK(rate_from_gap(l, 2.0 * g).mbps() ==
              doctest::Approx(rate_from_gap(l, g).mbps() / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("rate_from_gap rejects non-positive gaps") {
    CHECK_THROWS_AS(rate_from_gap(12112, 0.0), InvalidArgument);
    CHECK_THROWS_AS(rate_from_gap(12112, -1e-6), InvalidArgument);
}

TEST_CASE("gap_from_rate is the inverse of rate_from_gap") {
    RngStream rng(Seed{12});
    for (int i = 0; i < 200; ++i) {
        const std::int64_t l = 512 + static_cast<std::int64_t>(rng.next_below(12000));
        const RateMbps r(0.1 + rng.next_unit() * 999.0);
        const double g = gap_from_rate(l, r);
        CHECK(rate_from_gap(l, g).mbps() == doctest::Approx(r.mbps()).epsilon(1e-12));
    }
}

TEST_CASE("train_output_rate matches hand evaluations") {
    CHECK(train_output_rate({0.0, 121.12e-6, 242.24e-6}, 12112).mbps() ==
          doctest::Approx(100.0).epsilon(1e-12));
    CHECK(train_output_rate({0.0, 100e-6, 300e-6}, 12112).mbps() ==
          doctest::Approx(2.0 * 12112 / 300e-6 / 1e6).epsilon(1e-12));
}

TEST_CASE("equal gaps give l/g for any train length") {
    const double g = 151.4e-6;
    for (int n : {2, 5, 50}) {
        std::vector<double> times;
        for (int j = 0; j < n; ++j) times.push_back(j * g);
        CHECK(train_output_rate(times, 12112).mbps() ==
              doctest::Approx(12112 / g / 1e6).epsilon(1e-12));
    }
}

TEST_CASE("train_output_rate equals packet size over mean gap") {
    RngStream rng(Seed{13});
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> times{0.0};
        std::vector<double> gaps;
        const int n = 2 + static_cast<int>(rng.next_below(200));
        for (int j = 1; j < n; ++j) {
            gaps.push_back(1e-6 + rng.next_unit() * 400e-6);
            times.push_back(times.back() + gaps.back());
        }
        double mean_gap = 0.0;
        for (double g : gaps) mean_gap += g;
        mean_gap /= static_cast<double>(gaps.size());
        CHECK(train_output_rate(times, 12112).mbps() ==
              doctest::Approx(12112 / mean_gap / 1e6).epsilon(1e-12));
    }
}

TEST_CASE("train_output_rate rejects bad timestamp lists") {
    CHECK_THROWS_AS(train_output_rate({0.0}, 12112), InvalidMeasurement);
    CHECK_THROWS_AS(train_output_rate({0.0, 2e-6, 2e-6}, 12112), InvalidMeasurement);
    CHECK_THROWS_AS(train_output_rate({0.0, 3e-6, 1e-6}, 12112), InvalidMeasurement);
}

TEST_CASE("RateMbps rejects negative and non-finite values") {
    CHECK_THROWS_AS(RateMbps(-1.0), InvalidArgument);
    CHECK_THROWS_AS(RateMbps(std::nan("")), InvalidArgument);
    CHECK_THROWS_AS(RateMbps(std::numeric_limits<double>::infinity()), InvalidArgument);
    CHECK(RateMbps(0.0).mbps() == 0.0);
}

TEST_CASE("ActionGrid rates are i * increment, 1-based") {
    const ActionGrid grid(RateMbps(5.0), 20);
    CHECK(grid.rate(0).mbps() == 5.0);
    CHECK(grid.rate(9).mbps() == 50.0);
    CHECK(grid.top_rate().mbps() == 100.0);
    CHECK_THROWS_AS(grid.rate(20), InvalidArgument);
    CHECK_THROWS_AS(ActionGrid(RateMbps(5.0), 1), InvalidArgument);
    CHECK_THROWS_AS(ActionGrid(RateMbps(0.0), 10), InvalidArgument);
}

TEST_CASE("ProbeTrainSpec validates its invariants") {
    CHECK_THROWS_AS(ProbeTrainSpec(RateMbps(50.0), 12112, 1), InvalidArgument);
    CHECK_THROWS_AS(ProbeTrainSpec(RateMbps(0.0), 12112, 10), InvalidArgument);
    CHECK_THROWS_AS(ProbeTrainSpec(RateMbps(50.0), 0, 10), InvalidArgument);
    const ProbeTrainSpec spec(RateMbps(100.0), 12112, 3);
    CHECK(spec.input_gap_seconds() == doctest::Approx(121.12e-6).epsilon(1e-12));
}

TEST_CASE("TrainMeasurement derives gaps and output rate consistently") {
    const ProbeTrainSpec spec(RateMbps(100.0), 12112, 3);
    const auto m = TrainMeasurement::from_departures(spec, {1.0, 1.0001, 1.00025});
    REQUIRE(m.output_gaps().size() == 2);
    CHECK(m.output_gaps()[0] == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(m.output_gaps()[1] == doctest::Approx(1.5e-4).epsilon(1e-12));
    CHECK(m.output_rate().mbps() ==
          doctest::Approx(2.0 * 12112 / 2.5e-4 / 1e6).epsilon(1e-12));
    CHECK_THROWS_AS(TrainMeasurement::from_departures(spec, {1.0, 2.0}),
                    InvalidMeasurement);
}

TEST_CASE("RngStream sequences are reproducible") {
    RngStream a(Seed{42});
    RngStream b(Seed{42});
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("RngStream children are independent of parent consumption") {
    RngStream parent1(Seed{42});
    RngStream parent2(Seed{42});
    parent2.next_u64();  // consuming the parent must not move the children
    parent2.next_u64();
    RngStream c1 = parent1.child(7);
    RngStream c2 = parent2.child(7);
    for (int i = 0; i < 20; ++i) CHECK(c1.next_u64() == c2.next_u64());
}

TEST_CASE("RngStream distinct tags and names give distinct streams") {
    RngStream root(Seed{1});
    auto a = root.child(0);
    auto b = root.child(1);
    auto c = root.child("net");
    auto d = root.child("explore");
    std::set<std::uint64_t> firsts{a.next_u64(), b.next_u64(), c.next_u64(),
                                   d.next_u64()};
    CHECK(firsts.size() == 4);
}

TEST_CASE("RngStream next_below stays in range and covers values") {
    RngStream rng(Seed{5});
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto v = rng.next_below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
    CHECK_THROWS_AS(rng.next_below(0), InvalidArgument);
}

TEST_CASE("RngStream samplers have roughly the right means") {
    RngStream rng(Seed{6});
    double exp_sum = 0.0, par_sum = 0.0, gauss_sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        exp_sum += rng.next_exponential(2.0);
        par_sum += rng.next_pareto(1.0, 3.0);  // mean = 1.5 for shape 3
        gauss_sum += rng.next_gaussian(5.0, 2.0);
    }
    CHECK(exp_sum / n == doctest::Approx(2.0).epsilon(0.02));
    CHECK(par_sum / n == doctest::Approx(1.5).epsilon(0.02));
    CHECK(gauss_sum / n == doctest::Approx(5.0).epsilon(0.02));
}

TEST_SUITE_END();
