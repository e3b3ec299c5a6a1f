#pragma once

#include <cstdint>
#include <vector>

namespace semdist {

double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b, double gamma);

// Dual solution of the soft-margin SVM; decision u(x) = sum_i alpha_i y_i
// K(x_i, x) - bias.
struct SmoSolution {
    std::vector<double> alpha;
    double bias = 0.0;
    uint64_t steps = 0;
};

// Platt's sequential minimal optimization with an RBF kernel. Deterministic:
// the second-choice heuristic and scan orders are index-based. Stops when
// every example satisfies the KKT conditions within `tol`.
SmoSolution smo_solve(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                      double gamma, double c, double tol = 1e-3);

// Largest KKT violation of a solution: max over examples of the slack by
// which alpha_i's class (0, interior, C) contradicts y_i u(x_i), plus the
// equality constraint residual |sum alpha_i y_i|.
double kkt_violation(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                     double gamma, double c, const SmoSolution& solution);

class SvmModel {
public:
    static SvmModel train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                          double gamma, double c, double tol = 1e-3);

    double decision_value(const std::vector<double>& point) const;
    int predict(const std::vector<double>& point) const {
        return decision_value(point) >= 0.0 ? 1 : -1;
    }

    double gamma() const { return gamma_; }
    double cost() const { return c_; }
    size_t support_count() const { return support_.size(); }

private:
    std::vector<std::vector<double>> support_;
    std::vector<double> coef_; // alpha_i * y_i
    double bias_ = 0.0;
    double gamma_ = 1.0;
    double c_ = 1.0;
};

} // namespace semdist
