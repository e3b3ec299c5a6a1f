#include "semdist/svm.hpp"

#include "semdist/error.hpp"

#include <algorithm>
#include <cmath>

namespace semdist {

double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b, double gamma) {
    double sq = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        sq += d * d;
    }
    return std::exp(-gamma * sq);
}

namespace {

void check_problem(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                   double gamma, double c) {
    if (gamma <= 0.0 || c <= 0.0)
        fail(ErrorKind::InvalidParameter, "gamma and C must be positive");
    if (x.empty() || x.size() != y.size())
        fail(ErrorKind::InvalidParameter, "training data and labels must align");
    size_t dim = x[0].size();
    bool pos = false, neg = false;
    for (size_t i = 0; i < x.size(); ++i) {
        if (y[i] != 1 && y[i] != -1)
            fail(ErrorKind::InvalidParameter, "labels must be +1 or -1");
        if (x[i].size() != dim)
            fail(ErrorKind::InvalidFeature, "inconsistent feature dimensions");
        for (double v : x[i])
            if (!std::isfinite(v))
                fail(ErrorKind::InvalidFeature,
                     "non-finite feature in example " + std::to_string(i));
        (y[i] == 1 ? pos : neg) = true;
    }
    if (!pos || !neg)
        fail(ErrorKind::InsufficientData, "need at least one example of each label");
}

} // namespace

// Sequential minimal optimization with maximal-violating-pair selection.
// The bias-free margins f_i = sum_j alpha_j y_j K_ij drive both the working
// set and the stopping rule: optimality holds when
//   max over I_up of (y_i - f_i)  -  min over I_low of (y_i - f_i)  <= tol,
// at which point some threshold satisfies every KKT condition within tol.
SmoSolution smo_solve(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                      double gamma, double c, double tol) {
    check_problem(x, y, gamma, c);
    size_t n = x.size();

    std::vector<std::vector<double>> k(n, std::vector<double>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i; j < n; ++j)
            k[i][j] = k[j][i] = rbf_kernel(x[i], x[j], gamma);

    std::vector<double> alpha(n, 0.0);
    std::vector<double> f(n, 0.0);

    const uint64_t step_cap = 200000 + 2000ull * n;
    uint64_t steps = 0;
    while (steps < step_cap) {
        double up_best = -std::numeric_limits<double>::infinity();
        double low_best = std::numeric_limits<double>::infinity();
        size_t i = n, j = n;
        for (size_t t = 0; t < n; ++t) {
            double v = y[t] - f[t];
            bool in_up = (y[t] == 1 && alpha[t] < c) || (y[t] == -1 && alpha[t] > 0.0);
            bool in_low = (y[t] == -1 && alpha[t] < c) || (y[t] == 1 && alpha[t] > 0.0);
            if (in_up && v > up_best) {
                up_best = v;
                i = t;
            }
            if (in_low && v < low_best) {
                low_best = v;
                j = t;
            }
        }
        if (i >= n || j >= n || up_best - low_best <= tol)
            break;

        double s = y[i] * y[j];
        double low, high;
        if (y[i] != y[j]) {
            low = std::max(0.0, alpha[j] - alpha[i]);
            high = std::min(c, c + alpha[j] - alpha[i]);
        } else {
            low = std::max(0.0, alpha[i] + alpha[j] - c);
            high = std::min(c, alpha[i] + alpha[j]);
        }

        double eta = k[i][i] + k[j][j] - 2.0 * k[i][j];
        if (eta < 1e-12)
            eta = 1e-12;
        // E_i - E_j = (f_i - y_i) - (f_j - y_j) = low_best - up_best
        double a_j = alpha[j] + y[j] * (low_best - up_best) / eta;
        a_j = std::clamp(a_j, low, high);
        double a_i = alpha[i] + s * (alpha[j] - a_j);
        if (a_i < 0.0) {
            a_j += s * a_i;
            a_i = 0.0;
        } else if (a_i > c) {
            a_j += s * (a_i - c);
            a_i = c;
        }

        double di = (a_i - alpha[i]) * y[i];
        double dj = (a_j - alpha[j]) * y[j];
        if (di == 0.0 && dj == 0.0)
            break; // numerically stuck; the gap check decides the verdict
        for (size_t t = 0; t < n; ++t)
            f[t] += di * k[i][t] + dj * k[j][t];
        alpha[i] = a_i;
        alpha[j] = a_j;
        ++steps;
    }

    SmoSolution solution;
    solution.alpha = std::move(alpha);
    solution.steps = steps;

    // Threshold: average over free support vectors; fall back to the
    // midpoint of the feasible interval when every alpha sits on a bound.
    double free_sum = 0.0;
    size_t free_count = 0;
    double up_best = -std::numeric_limits<double>::infinity();
    double low_best = std::numeric_limits<double>::infinity();
    for (size_t t = 0; t < n; ++t) {
        double v = y[t] - f[t];
        if (solution.alpha[t] > 0.0 && solution.alpha[t] < c) {
            free_sum += v;
            ++free_count;
        }
        bool in_up = (y[t] == 1 && solution.alpha[t] < c) ||
                     (y[t] == -1 && solution.alpha[t] > 0.0);
        bool in_low = (y[t] == -1 && solution.alpha[t] < c) ||
                      (y[t] == 1 && solution.alpha[t] > 0.0);
        if (in_up)
            up_best = std::max(up_best, v);
        if (in_low)
            low_best = std::min(low_best, v);
    }
    // decision u = sum alpha y K - bias, so bias = -(chosen threshold)
    if (free_count > 0)
        solution.bias = -free_sum / static_cast<double>(free_count);
    else
        solution.bias = -(up_best + low_best) / 2.0;
    return solution;
}

double kkt_violation(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                     double gamma, double c, const SmoSolution& solution) {
    size_t n = x.size();
    double worst = 0.0;
    double balance = 0.0;
    const double eps = 1e-8 * c;
    for (size_t i = 0; i < n; ++i) {
        balance += solution.alpha[i] * y[i];
        if (solution.alpha[i] < -eps || solution.alpha[i] > c + eps)
            worst = std::max(worst, std::abs(solution.alpha[i] -
                                             std::clamp(solution.alpha[i], 0.0, c)));
        double u = -solution.bias;
        for (size_t j = 0; j < n; ++j)
            if (solution.alpha[j] > 0.0)
                u += solution.alpha[j] * y[j] * rbf_kernel(x[j], x[i], gamma);
        double margin = y[i] * u;
        if (solution.alpha[i] <= eps)
            worst = std::max(worst, 1.0 - margin); // must be >= 1
        else if (solution.alpha[i] >= c - eps)
            worst = std::max(worst, margin - 1.0); // must be <= 1
        else
            worst = std::max(worst, std::abs(margin - 1.0));
    }
    worst = std::max(worst, std::abs(balance));
    return std::max(worst, 0.0);
}

SvmModel SvmModel::train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                         double gamma, double c, double tol) {
    SmoSolution solution = smo_solve(x, y, gamma, c, tol);
    SvmModel model;
    model.gamma_ = gamma;
    model.c_ = c;
    model.bias_ = solution.bias;
    for (size_t i = 0; i < x.size(); ++i) {
        if (solution.alpha[i] > 1e-12) {
            model.support_.push_back(x[i]);
            model.coef_.push_back(solution.alpha[i] * y[i]);
        }
    }
    return model;
}

double SvmModel::decision_value(const std::vector<double>& point) const {
    double u = -bias_;
    for (size_t i = 0; i < support_.size(); ++i)
        u += coef_[i] * rbf_kernel(support_[i], point, gamma_);
    return u;
}

} // namespace semdist
