#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "semdist/anchor_svm.hpp"
#include "semdist/error.hpp"
#include "semdist/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace semdist;

namespace {

struct Blobs {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
};

Blobs gaussian_blobs(size_t per_class, uint64_t seed, double separation = 2.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.6);
    Blobs b;
    for (size_t i = 0; i < per_class; ++i) {
        b.x.push_back({separation + noise(rng), separation + noise(rng)});
        b.y.push_back(1);
        b.x.push_back({-separation + noise(rng), -separation + noise(rng)});
        b.y.push_back(-1);
    }
    return b;
}

size_t training_accuracy(const SvmModel& model, const std::vector<std::vector<double>>& x,
                         const std::vector<int>& y) {
    size_t correct = 0;
    for (size_t i = 0; i < x.size(); ++i)
        if (model.predict(x[i]) == y[i])
            ++correct;
    return correct;
}

} // namespace

TEST_CASE("two linearly separable points train to 100%") {
    std::vector<std::vector<double>> x{{0.0, 0.0}, {1.0, 1.0}};
    std::vector<int> y{-1, 1};
    SvmModel model = SvmModel::train(x, y, 1.0, 10.0);
    CHECK(training_accuracy(model, x, y) == 2);
}

TEST_CASE("XOR is separable with an RBF kernel") {
    std::vector<std::vector<double>> x{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    std::vector<int> y{1, 1, -1, -1};
    SvmModel model = SvmModel::train(x, y, 2.0, 100.0);
    CHECK(training_accuracy(model, x, y) == 4);
}

TEST_CASE("contradictory duplicate labels do not crash") {
    std::vector<std::vector<double>> x{{0.5, 0.5}, {0.5, 0.5}, {2.0, 2.0}, {-2.0, -2.0}};
    std::vector<int> y{1, -1, 1, -1};
    SvmModel model = SvmModel::train(x, y, 1.0, 10.0);
    size_t dup_correct = (model.predict(x[0]) == y[0] ? 1 : 0) +
                         (model.predict(x[1]) == y[1] ? 1 : 0);
    CHECK(dup_correct <= 1); // identical points, opposite labels
}

TEST_CASE("SMO solutions satisfy the KKT conditions to 1e-3") {
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        Blobs b = gaussian_blobs(20, seed);
        for (double gamma : {0.25, 1.0}) {
            for (double c : {0.5, 8.0}) {
                SmoSolution solution = smo_solve(b.x, b.y, gamma, c, 1e-3);
                CHECK(kkt_violation(b.x, b.y, gamma, c, solution) <= 1e-3);
                double balance = 0.0;
                for (size_t i = 0; i < b.x.size(); ++i) {
                    CHECK(solution.alpha[i] >= -1e-12);
                    CHECK(solution.alpha[i] <= c + 1e-12);
                    balance += solution.alpha[i] * b.y[i];
                }
                CHECK(std::abs(balance) <= 1e-9);
            }
        }
    }
}

TEST_CASE("decisions are invariant under training-order permutation") {
    Blobs b = gaussian_blobs(15, 44);
    SvmModel base = SvmModel::train(b.x, b.y, 0.5, 4.0);

    std::vector<size_t> order(b.x.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(7);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<double>> px;
    std::vector<int> py;
    for (size_t i : order) {
        px.push_back(b.x[i]);
        py.push_back(b.y[i]);
    }
    SvmModel permuted = SvmModel::train(px, py, 0.5, 4.0);

    std::uniform_real_distribution<double> grid(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> point{grid(rng), grid(rng)};
        double d = base.decision_value(point);
        if (std::abs(d) > 1e-2)
            CHECK(base.predict(point) == permuted.predict(point));
    }
}

TEST_CASE("invalid training inputs are rejected") {
    std::vector<std::vector<double>> x{{0.0}, {1.0}};
    CHECK_THROWS_AS(SvmModel::train(x, {1, 1}, 1.0, 1.0), Error);   // one class
    CHECK_THROWS_AS(SvmModel::train(x, {1, -1}, -1.0, 1.0), Error); // bad gamma
    std::vector<std::vector<double>> bad{{std::numeric_limits<double>::infinity()}, {0.0}};
    try {
        SvmModel::train(bad, {1, -1}, 1.0, 1.0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidFeature);
    }
}

TEST_CASE("cross validation: ties resolve to the smallest grid point") {
    std::vector<std::vector<double>> x(12, std::vector<double>{0.5, 0.5});
    std::vector<int> y;
    for (int i = 0; i < 12; ++i)
        y.push_back(i % 2 == 0 ? 1 : -1);
    CvChoice choice = cross_validate(x, y, CvGrid::defaults(), 1);
    CHECK(choice.gamma == std::ldexp(1.0, -7));
    CHECK(choice.c == std::ldexp(1.0, -3));
}

TEST_CASE("cross validation finds a perfect grid point on separable data") {
    Blobs b = gaussian_blobs(10, 5, 3.0);
    CvChoice choice = cross_validate(b.x, b.y, CvGrid::defaults(), 2);
    CHECK(choice.mean_accuracy == 1.0);
}

TEST_CASE("cross validation is deterministic for a fixed seed") {
    Blobs b = gaussian_blobs(8, 6);
    CvChoice a = cross_validate(b.x, b.y, CvGrid::defaults(), 42);
    CvChoice c = cross_validate(b.x, b.y, CvGrid::defaults(), 42);
    CHECK(a.gamma == c.gamma);
    CHECK(a.c == c.c);
    CHECK(a.mean_accuracy == c.mean_accuracy);
}

TEST_CASE("cross validation needs 5 examples per class") {
    std::vector<std::vector<double>> x{{0}, {1}, {2}, {3}, {4}, {5}};
    std::vector<int> y{1, 1, 1, -1, -1, -1};
    try {
        cross_validate(x, y, CvGrid::defaults(), 1);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InsufficientData);
    }
}

TEST_CASE("the default grid spans the documented powers of two") {
    CvGrid grid = CvGrid::defaults();
    CHECK(grid.gammas.size() == 11);
    CHECK(grid.costs.size() == 11);
    CHECK(grid.gammas.front() == std::ldexp(1.0, -7));
    CHECK(grid.gammas.back() == std::ldexp(1.0, 3));
    CHECK(grid.costs.front() == std::ldexp(1.0, -3));
    CHECK(grid.costs.back() == std::ldexp(1.0, 7));
}
