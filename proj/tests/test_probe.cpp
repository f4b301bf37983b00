#include <cmath>

#include "clrlab/data.hpp"
#include "clrlab/error.hpp"
#include "clrlab/probe.hpp"
#include "clrlab/trainer.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace clrlab;

namespace {

const Dataset& moons() {
    static const Dataset d = make_moons(400, 0.1, 2, 0.25);
    return d;
}

const ArchitectureSpec& arch() {
    static const ArchitectureSpec a({2, 12, 2}, Activation::Tanh);
    return a;
}

NetworkWeights trained(std::uint64_t seed, std::uint64_t iters) {
    TrainConfig cfg{arch(), ConstantLr{0.1}, iters, 32, 0.9, 1e-4, seed, iters, {}};
    return train(cfg, moons()).final_weights;
}

NetworkWeights filled(double v) {
    return NetworkWeights(arch(), std::vector<double>(arch().param_count(), v));
}

InterpolationCurve synthetic(std::vector<double> alphas, std::vector<double> train,
                             std::vector<double> test) {
    InterpolationCurve c;
    c.alphas = std::move(alphas);
    c.train_losses = std::move(train);
    c.test_losses = std::move(test);
    c.test_accuracies.assign(c.alphas.size(), 0.5);
    return c;
}

}  // namespace

TEST_CASE("interpolation arithmetic") {
    CHECK(interpolate_weights(filled(2.0), filled(4.0), 0.5) == filled(3.0));
    CHECK(interpolate_weights(filled(0.0), filled(1.0), 1.25) == filled(-0.25));
    CHECK_THROWS_AS(interpolate_weights(filled(0.0), NetworkWeights(ArchitectureSpec({2, 3, 2}, Activation::Tanh)), 0.5),
                    ConfigError);
    CHECK_THROWS_AS(interpolate_weights(filled(0.0), NetworkWeights(ArchitectureSpec({2, 12, 2}, Activation::ReLU)), 0.5),
                    ConfigError);
}

TEST_CASE("endpoint identities are bitwise") {
    Rng rng(3);
    const auto a = test_util::random_weights(rng, arch(), 1.3);
    const auto b = test_util::random_weights(rng, arch(), 0.4);
    CHECK(test_util::bitwise_equal(interpolate_weights(a, b, 1.0).params(), a.params()));
    CHECK(test_util::bitwise_equal(interpolate_weights(a, b, 0.0).params(), b.params()));
    const auto e1 = evaluate(interpolate_weights(a, b, 1.0), moons().test);
    const auto e2 = evaluate(a, moons().test);
    CHECK(test_util::same_bits(e1.loss, e2.loss));
    CHECK(e1.accuracy == e2.accuracy);
}

TEST_CASE("interpolation is symmetric under swapping the endpoints") {
    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
        const auto a = test_util::random_weights(rng, arch(), 1.0);
        const auto b = test_util::random_weights(rng, arch(), 1.0);
        const double alpha = 1.5 * rng.uniform() - 0.25;
        const auto x = interpolate_weights(a, b, alpha);
        const auto y = interpolate_weights(b, a, alpha);
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double sum = a.params()[k] + b.params()[k];
            CHECK(std::abs(x.params()[k] + y.params()[k] - sum) <= 1e-15 * std::max(1.0, std::abs(sum)));
        }
    }
}

TEST_CASE("alpha grids") {
    const auto g = default_alpha_grid();
    REQUIRE(g.size() == 51);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK(g[25] == 0.5);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] - g[i - 1] == doctest::Approx(0.02));
    const auto e = extended_alpha_grid();
    REQUIRE(e.size() == 61);
    CHECK(e.front() == -0.25);
    CHECK(e.back() == 1.25);
    CHECK(std::count(e.begin(), e.end(), 0.0) == 1);
    CHECK(std::count(e.begin(), e.end(), 1.0) == 1);
    CHECK_THROWS_AS(default_alpha_grid(2), ConfigError);
}

TEST_CASE("identical endpoints give a flat curve and a same-basin verdict") {
    const auto w = trained(1, 300);
    const auto curve = interpolation_curve(w, w, default_alpha_grid(), moons());
    for (std::size_t i = 0; i < curve.alphas.size(); ++i) {
        CHECK(test_util::same_bits(curve.train_losses[i], curve.train_losses[0]));
        CHECK(test_util::same_bits(curve.test_losses[i], curve.test_losses[0]));
    }
    for (double tol : {1e-12, 0.1, 5.0}) {
        const auto v = classify_pair(curve, tol);
        CHECK(v.kind == BasinKind::SameBasin);
        CHECK(v.barrier_height == 0.0);
        CHECK(v.test_min_alpha == 0.5);
        CHECK(v.test_min_interior);
    }
    const auto pick = regularize_by_interpolation(w, w, moons(), default_alpha_grid());
    CHECK(pick.best_alpha == 0.5);
    CHECK(pick.weights == w);
}

TEST_CASE("synthetic barrier fixture") {
    const auto c = synthetic({0.0, 0.25, 0.5, 0.75, 1.0}, {0.3, 1.0, 2.3, 1.0, 0.2}, {0.4, 0.3, 0.9, 0.3, 0.5});
    const auto v = classify_pair(c, 0.1);
    CHECK(v.kind == BasinKind::DistinctMinima);
    CHECK(v.barrier_height == doctest::Approx(2.0).epsilon(1e-12));
    // 0.25 and 0.75 tie on test loss at equal distance from 0.5: the smaller wins.
    CHECK(v.test_min_alpha == 0.25);
    CHECK(v.test_min_interior);

    const auto convex = synthetic({0.0, 0.5, 1.0}, {0.5, 0.2, 0.4}, {0.1, 0.3, 0.2});
    const auto cv = classify_pair(convex, 0.1);
    CHECK(cv.kind == BasinKind::SameBasin);
    CHECK(cv.barrier_height == doctest::Approx(-0.3));
    CHECK(cv.test_min_alpha == 0.0);
    CHECK_FALSE(cv.test_min_interior);
}

TEST_CASE("curve validation") {
    CHECK_THROWS_AS(validate(synthetic({0.0, 1.0}, {1, 1}, {1, 1})), ConfigError);
    CHECK_THROWS_AS(validate(synthetic({0.0, 0.6, 0.5, 1.0}, {1, 1, 1, 1}, {1, 1, 1, 1})), ConfigError);
    CHECK_THROWS_AS(validate(synthetic({0.1, 0.5, 1.0}, {1, 1, 1}, {1, 1, 1})), ConfigError);
    CHECK_THROWS_AS(validate(synthetic({0.0, 0.5, 1.0}, {1, -1, 1}, {1, 1, 1})), ConfigError);
    CHECK_THROWS_AS(interpolation_curve(filled(0.0), filled(0.0), {0.0, 0.5}, moons()), ConfigError);
}

TEST_CASE("NaN along the path is a numeric error naming alpha") {
    auto a = filled(0.0);
    auto b = filled(0.0);
    b.params()[0] = std::numeric_limits<double>::infinity();
    a.params()[0] = -std::numeric_limits<double>::infinity();
    try {
        interpolation_curve(a, b, default_alpha_grid(5), moons());
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("alpha") != std::string::npos);
    }
}

TEST_CASE("parallel and serial curves agree and barrier is swap invariant") {
    const auto a = trained(1, 600);
    const auto b = trained(2, 600);
    const auto grid = default_alpha_grid();
    const auto serial = interpolation_curve(a, b, grid, moons(), 1);
    const auto parallel = interpolation_curve(a, b, grid, moons(), 4);
    CHECK(serial == parallel);

    std::vector<double> reflected;
    for (auto it = grid.rbegin(); it != grid.rend(); ++it) reflected.push_back(1.0 - *it);
    const auto swapped = interpolation_curve(b, a, reflected, moons());
    CHECK(classify_pair(swapped).barrier_height ==
          doctest::Approx(classify_pair(serial).barrier_height).epsilon(1e-12));
}

TEST_CASE("regularization pick is consistent with the curve") {
    const auto a = trained(1, 400);
    const auto b = trained(1, 800);
    const auto pick = regularize_by_interpolation(a, b, moons(), default_alpha_grid(), 2);
    const std::size_t i = test_min_index(pick.curve);
    CHECK(pick.best_alpha == pick.curve.alphas[i]);
    CHECK(std::abs(evaluate(pick.weights, moons().test).loss - pick.curve.test_losses[i]) < 1e-12);
    const double best = pick.curve.test_losses[i];
    CHECK(best <= pick.curve.test_losses.front());
    CHECK(best <= pick.curve.test_losses.back());
    if (pick.best_alpha == 1.0) CHECK(pick.weights == a);
    if (pick.best_alpha == 0.0) CHECK(pick.weights == b);
}

TEST_CASE("curve CSV format") {
    const auto dir = test_util::scratch_dir("curve");
    write_curve_csv(dir / "c.csv", synthetic({0.0, 0.5, 1.0}, {1.0, 2.0, 0.25}, {0.5, 0.5, 0.5}));
    CHECK(test_util::read_file(dir / "c.csv") ==
          "alpha,train_loss,test_loss,test_accuracy\n0,1,0.5,0.5\n0.5,2,0.5,0.5\n1,0.25,0.5,0.5\n");
}
