#include <cmath>
#include <numeric>

#include "xva/simulation.hpp"

namespace xva {

Regressor::Regressor(const std::vector<const double*>& features, std::size_t n, double ridge) {
    if (n == 0) throw InputError("regression needs at least one sample");
    const double dn = static_cast<double>(n);

    // Standardize and drop near-constant features.
    std::vector<std::vector<double>> z;
    for (const double* f : features) {
        const double mean = std::accumulate(f, f + n, 0.0) / dn;
        double var = 0.0;
        for (std::size_t p = 0; p < n; ++p) var += (f[p] - mean) * (f[p] - mean);
        const double sd = std::sqrt(var / dn);
        if (!(sd > 1e-12 * (1.0 + std::abs(mean)))) continue;
        std::vector<double> col(n);
        for (std::size_t p = 0; p < n; ++p) col[p] = (f[p] - mean) / sd;
        z.push_back(std::move(col));
    }
    const std::size_t d = z.size();
    const std::size_t k = 1 + 2 * d + d * (d - 1) / 2;
    design_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    for (std::size_t p = 0; p < n; ++p) {
        Eigen::Index c = 0;
        const auto r = static_cast<Eigen::Index>(p);
        design_(r, c++) = 1.0;
        for (std::size_t i = 0; i < d; ++i) design_(r, c++) = z[i][p];
        for (std::size_t i = 0; i < d; ++i) design_(r, c++) = z[i][p] * z[i][p] - 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i + 1; j < d; ++j) design_(r, c++) = z[i][p] * z[j][p];
        }
    }
    if (n < 10 * k) throw InputError("regression needs at least ten samples per basis function");

    gram_ = design_.transpose() * design_ / dn;
    Eigen::MatrixXd reg = gram_;
    reg.diagonal().array() += ridge;
    solver_.compute(reg);
    if (solver_.info() != Eigen::Success) degenerate_ = true;
}

void Regressor::fit(const double* values, double* out) const {
    const auto n = design_.rows();
    Eigen::Map<const Eigen::VectorXd> v(values, n);
    const double mean = v.mean();
    if (!degenerate_) {
        const Eigen::VectorXd b = design_.transpose() * v / static_cast<double>(n);
        // Ridge-preconditioned iterative refinement towards the plain normal
        // equations: well-determined directions converge to the exact least
        // squares solution, ill-determined ones stay damped.
        Eigen::VectorXd beta = solver_.solve(b);
        for (int it = 0; it < 3; ++it) beta += solver_.solve(b - gram_ * beta);
        if (beta.allFinite()) {
            Eigen::Map<Eigen::VectorXd>(out, n) = design_ * beta;
            return;
        }
    }
    std::fill(out, out + n, mean);
}

std::vector<double> Regressor::fit(const double* values) const {
    std::vector<double> out(static_cast<std::size_t>(design_.rows()));
    fit(values, out.data());
    return out;
}

std::vector<double> regress_conditional(const std::vector<double>& values,
                                        const std::vector<const double*>& features) {
    Regressor reg(features, values.size());
    return reg.fit(values.data());
}

}  // namespace xva
