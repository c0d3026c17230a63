#include "xva/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>

#include "xva/parallel.hpp"
#include "xva/rng.hpp"

namespace xva {

namespace {
constexpr double kTimeTol = 1e-9;
}

TimeGrid TimeGrid::build(double horizon, double dt_max, std::vector<double> mandatory) {
    if (!(horizon > 0.0) || !(dt_max > 0.0)) throw InputError("time grid needs positive horizon and step");
    mandatory.push_back(0.0);
    mandatory.push_back(horizon);
    std::sort(mandatory.begin(), mandatory.end());
    std::vector<double> knots;
    for (double t : mandatory) {
        if (t < -kTimeTol || t > horizon + kTimeTol) continue;
        t = std::clamp(t, 0.0, horizon);
        if (knots.empty() || t - knots.back() > kTimeTol) knots.push_back(t);
    }
    TimeGrid g;
    g.times.push_back(0.0);
    for (std::size_t k = 1; k < knots.size(); ++k) {
        const double gap = knots[k] - knots[k - 1];
        const int n = std::max(1, static_cast<int>(std::ceil(gap / dt_max - 1e-9)));
        for (int j = 1; j < n; ++j) g.times.push_back(knots[k - 1] + gap * j / n);
        g.times.push_back(knots[k]);
    }
    return g;
}

std::size_t TimeGrid::index_of(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t - kTimeTol);
    if (it == times.end() || std::abs(*it - t) > kTimeTol) {
        throw InputError("time " + std::to_string(t) + " is not on the simulation grid");
    }
    return static_cast<std::size_t>(it - times.begin());
}

bool TimeGrid::contains(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t - kTimeTol);
    return it != times.end() && std::abs(*it - t) <= kTimeTol;
}

void TimeGrid::validate(double dt_max) const {
    if (times.size() < 2 || times.front() != 0.0) throw InputError("time grid must start at 0");
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        if (!(times[i + 1] > times[i])) throw InputError("time grid must be strictly increasing");
        if (dt(i) > dt_max * (1.0 + 1e-9)) throw InputError("time grid step exceeds the maximum");
    }
}

std::uint64_t PathSet::checksum() const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a over raw bytes
    auto mix = [&h](const std::vector<double>& v) {
        const auto* b = reinterpret_cast<const unsigned char*>(v.data());
        for (std::size_t k = 0; k < v.size() * sizeof(double); ++k) {
            h ^= b[k];
            h *= 1099511628211ull;
        }
    };
    for (const auto* v : {&x1, &x2, &yc, &yi, &int_e, &int_lc, &int_li}) mix(*v);
    return h;
}

Eigen::Matrix4d step_covariance(const G2Params& p, const CorrelationSpec& corr, double h) {
    const double a[2] = {p.a1, p.a2};
    Eigen::Matrix4d c;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double r = corr.m(i, j);
            if (i < 2 && j < 2) {
                c(i, j) = r * g2_b(a[i] + a[j], h);
            } else if (i < 2) {
                c(i, j) = r * g2_b(a[i], h);
            } else if (j < 2) {
                c(i, j) = r * g2_b(a[j], h);
            } else {
                c(i, j) = r * h;
            }
        }
    }
    return c;
}

namespace {

Eigen::Matrix4d factor(const Eigen::Matrix4d& cov) {
    Eigen::LLT<Eigen::Matrix4d> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    // Singular but PSD (e.g. perfectly correlated factors): symmetric square root.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(cov);
    if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, es.eigenvalues().maxCoeff())) {
        throw InputError("step covariance is not positive semidefinite");
    }
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

PathSet generate_paths(const HybridModel& model, const TimeGrid& grid, const SimulationOptions& opt) {
    if (opt.n_paths < 2) throw InputError("need at least two paths");
    if (opt.substeps < 1) throw InputError("substeps must be positive");
    model.corr.validate();
    const auto& g2 = model.rates.params();
    const auto& pc = model.credit_c.params();
    const auto& pi = model.credit_i.params();

    PathSet ps;
    ps.grid = grid;
    ps.n_paths = opt.n_paths;
    ps.seed = opt.seed;
    ps.substeps = opt.substeps;
    const std::size_t nt = grid.size();
    const std::size_t total = nt * opt.n_paths;
    for (auto* v : {&ps.x1, &ps.x2, &ps.yc, &ps.yi, &ps.int_e, &ps.int_lc, &ps.int_li}) v->assign(total, 0.0);

    // Per-interval deterministic pieces and step factors.
    struct Step {
        double h;
        double e1, e2;
        Eigen::Matrix4d chol;
        double phi_int;   // whole grid interval
        double dpsi_c, dpsi_i;
    };
    std::vector<Step> steps(nt - 1);
    std::map<double, Eigen::Matrix4d> cache;
    const Eigen::Vector4d scale(g2.sigma1, g2.sigma2, 1.0, 1.0);
    for (std::size_t i = 0; i + 1 < nt; ++i) {
        const double dt = grid.dt(i);
        const double h = dt / opt.substeps;
        auto it = cache.find(h);
        if (it == cache.end()) {
            it = cache.emplace(h, factor(step_covariance(g2, model.corr, h))).first;
        }
        steps[i] = {h,
                    std::exp(-g2.a1 * h),
                    std::exp(-g2.a2 * h),
                    scale.asDiagonal() * it->second,
                    model.rates.phi_integral(grid.times[i], dt),
                    model.credit_c.shift_integral(grid.times[i + 1]) - model.credit_c.shift_integral(grid.times[i]),
                    model.credit_i.shift_integral(grid.times[i + 1]) - model.credit_i.shift_integral(grid.times[i])};
    }

    const std::size_t np = opt.n_paths;
    parallel_chunks(np, opt.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            double x1 = 0.0, x2 = 0.0, yc = pc.y0, yi = pi.y0;
            double ie = 0.0, ilc = 0.0, ili = 0.0;
            ps.yc[p] = std::max(yc, 0.0);
            ps.yi[p] = std::max(yi, 0.0);
            for (std::size_t i = 0; i + 1 < nt; ++i) {
                const auto& s = steps[i];
                NormalStream rng(opt.seed, p, static_cast<std::uint32_t>(i));
                double sx = 0.0, syc = 0.0, syi = 0.0;  // trapezoid sums over substeps
                for (int k = 0; k < opt.substeps; ++k) {
                    Eigen::Vector4d z;
                    for (int d = 0; d < 4; ++d) z[d] = rng.next();
                    const Eigen::Vector4d w = s.chol * z;
                    const double x_before = x1 + x2;
                    const double ycp = std::max(yc, 0.0), yip = std::max(yi, 0.0);
                    x1 = s.e1 * x1 + w[0];
                    x2 = s.e2 * x2 + w[1];
                    yc += pc.kappa * (pc.mu - ycp) * s.h + pc.nu * std::sqrt(ycp) * w[2];
                    yi += pi.kappa * (pi.mu - yip) * s.h + pi.nu * std::sqrt(yip) * w[3];
                    sx += 0.5 * s.h * (x_before + x1 + x2);
                    syc += 0.5 * s.h * (ycp + std::max(yc, 0.0));
                    syi += 0.5 * s.h * (yip + std::max(yi, 0.0));
                }
                ie += s.phi_int + sx;
                ilc += s.dpsi_c + syc;
                ili += s.dpsi_i + syi;
                const std::size_t idx = ps.at(i + 1, p);
                ps.x1[idx] = x1;
                ps.x2[idx] = x2;
                ps.yc[idx] = std::max(yc, 0.0);
                ps.yi[idx] = std::max(yi, 0.0);
                ps.int_e[idx] = ie;
                ps.int_lc[idx] = ilc;
                ps.int_li[idx] = ili;
            }
        }
    });
    return ps;
}

}  // namespace xva
