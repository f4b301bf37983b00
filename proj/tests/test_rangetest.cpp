#include <cmath>

#include "clrlab/data.hpp"
#include "clrlab/error.hpp"
#include "clrlab/rangetest.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace clrlab;

namespace {

// Evenly spaced rates from lo to hi, one per accuracy value.
RangeCurve curve_of(std::vector<double> acc, double lo = 0.01, double hi = 1.0) {
    RangeCurve c;
    const std::size_t n = acc.size();
    for (std::size_t i = 0; i < n; ++i) {
        c.lrs.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        c.train_losses.push_back(1.0);
    }
    c.test_accuracies = std::move(acc);
    return c;
}

std::vector<double> dip_fixture() {
    std::vector<double> acc(10, 0.8);
    acc.insert(acc.end(), 5, 0.6);
    acc.insert(acc.end(), 10, 0.8);
    return acc;
}

// Rise, dip around 0.1, shelf from 0.25 to 1.0 on lrs 0.01..1.0 step 0.01.
RangeCurve shelf_fixture() {
    std::vector<double> acc;
    for (int i = 1; i <= 100; ++i) {
        const double lr = i / 100.0;
        double a;
        if (lr < 0.06) a = 0.5 + 5.0 * lr;                  // rising to ~0.8
        else if (lr <= 0.14) a = 0.6;                       // dip near 0.1
        else if (lr < 0.25) a = 0.6 + (lr - 0.14) * 2.5;    // climb to the shelf
        else a = 0.9 - 0.02 * std::sin(lr * 20.0);          // high shelf
        acc.push_back(a);
    }
    return curve_of(acc, 0.01, 1.0);
}

}  // namespace

TEST_CASE("moving average truncates at the ends") {
    const auto m = moving_average({1, 2, 3, 4, 10}, 1);
    CHECK(m[0] == 1.5);
    CHECK(m[1] == 2.0);
    CHECK(m[2] == 3.0);
    CHECK(m[4] == 7.0);
    CHECK(moving_average({4, 5}, 0) == std::vector<double>{4, 5});
}

TEST_CASE("monotone accuracy has no dips") {
    std::vector<double> acc;
    for (int i = 0; i < 40; ++i) acc.push_back(0.3 + 0.015 * i);
    CHECK(detect_dip(curve_of(acc), 5, 0.05).empty());
}

TEST_CASE("constructed dip fixture") {
    const auto c = curve_of(dip_fixture());
    const auto dips = detect_dip(c, 1, 0.1);
    REQUIRE(dips.size() == 1);
    CHECK(dips[0].depth == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(dips[0].first >= 9);
    CHECK(dips[0].last <= 15);
    CHECK(dips[0].lr_start == c.lrs[dips[0].first]);
    CHECK(dips[0].lr_end == c.lrs[dips[0].last]);
    // Interior minimum lies below the pre-region maximum by at least min_depth.
    double lo = 1.0;
    for (std::size_t i = dips[0].first; i <= dips[0].last; ++i) lo = std::min(lo, c.test_accuracies[i]);
    CHECK(lo < 0.8 - 0.1 + 1e-12);
}

TEST_CASE("terminal collapse is not a dip") {
    std::vector<double> acc(20, 0.9);
    acc.insert(acc.end(), 10, 0.2);
    CHECK(detect_dip(curve_of(acc), 1, 0.1).empty());
    CHECK(detect_dip(curve_of(acc), 3, 0.1).empty());
}

TEST_CASE("shallow dips are ignored") {
    std::vector<double> acc(10, 0.8);
    acc.insert(acc.end(), 5, 0.76);
    acc.insert(acc.end(), 10, 0.8);
    CHECK(detect_dip(curve_of(acc), 1, 0.1).empty());
}

TEST_CASE("plateau fixtures") {
    const auto flat = curve_of(std::vector<double>(12, 0.7), 0.2, 3.0);
    const auto p = detect_plateau(flat, 0.05);
    REQUIRE(p.has_value());
    CHECK(p->first == 0.2);
    CHECK(p->second == 3.0);

    std::vector<double> spike(15, 0.3);
    spike[7] = 0.9;
    CHECK_FALSE(detect_plateau(curve_of(spike), 0.1).has_value());

    const auto fig = shelf_fixture();
    const auto shelf = detect_plateau(fig, 0.05);
    REQUIRE(shelf.has_value());
    CHECK(shelf->first <= 0.25 + 1e-12);
    CHECK(shelf->second >= 1.0 - 1e-12);
    const auto dips = detect_dip(fig, 1, 0.05);
    REQUIRE(dips.size() == 1);
    CHECK(dips[0].lr_start <= 0.1);
    CHECK(dips[0].lr_end >= 0.1);
}

TEST_CASE("tolerance 1.0 plateau spans the full range") {
    Rng rng(6);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> acc;
        for (int i = 0; i < 30; ++i) acc.push_back(rng.uniform());
        const auto c = curve_of(acc, 0.001, 10.0);
        const auto p = detect_plateau(c, 1.0);
        REQUIRE(p.has_value());
        CHECK(p->first == c.lrs.front());
        CHECK(p->second == c.lrs.back());
    }
}

TEST_CASE("features are invariant under affine rescaling of the lr axis") {
    Rng rng(9);
    const auto base = shelf_fixture();
    for (int t = 0; t < 10; ++t) {
        const double scale = 0.1 + 10.0 * rng.uniform();
        const double shift = rng.uniform();
        RangeCurve moved = base;
        for (auto& lr : moved.lrs) lr = scale * lr + shift;
        const auto d0 = detect_dip(base, 1, 0.05);
        const auto d1 = detect_dip(moved, 1, 0.05);
        REQUIRE(d0.size() == d1.size());
        for (std::size_t i = 0; i < d0.size(); ++i) {
            CHECK(d0[i].first == d1[i].first);
            CHECK(d0[i].last == d1[i].last);
            CHECK(d0[i].depth == d1[i].depth);
        }
        const auto p0 = detect_plateau(base, 0.05);
        const auto p1 = detect_plateau(moved, 0.05);
        REQUIRE(p1.has_value());
        const auto idx = [](const RangeCurve& c, double lr) {
            return std::find(c.lrs.begin(), c.lrs.end(), lr) - c.lrs.begin();
        };
        CHECK(idx(base, p0->first) == idx(moved, p1->first));
        CHECK(idx(base, p0->second) == idx(moved, p1->second));
    }
}

TEST_CASE("divergence detection on train loss") {
    RangeCurve c = curve_of(std::vector<double>(6, 0.5));
    c.train_losses = {1.0, 0.5, 0.3, 0.6, 1.5, 9.0};
    REQUIRE(detect_divergence(c).has_value());
    CHECK(*detect_divergence(c) == c.lrs[4]);
    c.train_losses = {1.0, 1.2, 0.5, 0.4, 0.3, 0.2};
    CHECK_FALSE(detect_divergence(c).has_value());
    c.train_losses = {1.0, 0.5, std::nan(""), 0.4, 0.3, 0.2};
    CHECK(*detect_divergence(c) == c.lrs[2]);
}

TEST_CASE("range test orchestration") {
    const auto data = make_moons(400, 0.1, 1, 0.25);
    ArchitectureSpec arch({2, 8, 2}, Activation::ReLU);
    TrainConfig cfg{arch, LinearRange{0.001, 1.0, 200}, 200, 32, 0.9, 1e-4, 3, 20, {}};
    TrainResult trace{NetworkWeights(arch), {}, {}, std::nullopt};
    const auto curve = run_range_test(cfg, data, &trace);
    CHECK(curve.lrs.front() == 0.001);
    CHECK(curve.lrs.back() == 1.0);
    CHECK(curve.size() == 11);
    CHECK(trace.metrics.size() == 11);
    CHECK(curve == run_range_test(cfg, data));

    TrainConfig tri = cfg;
    tri.schedule = Triangular{0.1, 0.35, 50};
    CHECK_THROWS_AS(run_range_test(tri, data), ConfigError);
    TrainConfig mismatch = cfg;
    mismatch.total_iters = 100;
    CHECK_THROWS_AS(run_range_test(mismatch, data), ConfigError);
}

TEST_CASE("range and feature outputs") {
    const auto dir = test_util::scratch_dir("range");
    RangeCurve c = curve_of({0.5, 0.75}, 0.5, 1.0);
    write_range_csv(dir / "r.csv", c);
    CHECK(test_util::read_file(dir / "r.csv") == "lr,test_accuracy,train_loss\n0.5,0.5,1\n1,0.75,1\n");

    RangeFeatures f;
    f.dips.push_back({2, 4, 0.1, 0.2, 0.25});
    f.plateau = std::make_pair(0.25, 1.0);
    f.divergence_lr = 3.0;
    write_features_csv(dir / "f.csv", f);
    CHECK(test_util::read_file(dir / "f.csv") ==
          "feature,lr_start,lr_end,depth\ndip,0.10000000000000001,0.20000000000000001,0.25\n"
          "plateau,0.25,1,\ndivergence,3,3,\n");
    const auto text = format_features(f);
    CHECK(text.find("dip_count = 1") != std::string::npos);
    CHECK(text.find("plateau.lr_low = 0.25") != std::string::npos);
}
