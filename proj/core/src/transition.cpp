#include "tvmdp/transition.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tvmdp {

namespace {

// 5-node Gauss-Legendre rule on [-1, 1].
constexpr int kNodes = 5;
constexpr double kGlNode[kNodes] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                    0.5384693101056831, 0.9061798459386640};
constexpr double kGlWeight[kNodes] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                      0.4786286704993665, 0.2369268850561891};

constexpr int kMaxPanels = 64;

int panels_for(double cell, double sigma) {
    // Panel width <= 1.5 sigma keeps the GL-5 error per cell below ~1e-8.
    const double w = 1.5 * sigma;
    if (!(w > 0.0)) return kMaxPanels;
    return std::clamp(static_cast<int>(std::ceil(cell / w)), 1, kMaxPanels);
}

// Composite 1-D integral of exp(-(x-mu)^2 / (2 sig2)) / sqrt(2 pi sig2) over [lo, hi].
double gauss_mass_1d(double mu, double sig2, double lo, double hi, int panels) {
    const double inv2s = 0.5 / sig2;
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * sig2);
    const double step = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * step;
        const double mid = a + 0.5 * step;
        const double half = 0.5 * step;
        double acc = 0.0;
        for (int n = 0; n < kNodes; ++n) {
            const double x = mid + half * kGlNode[n];
            const double d = x - mu;
            acc += kGlWeight[n] * std::exp(-d * d * inv2s);
        }
        total += acc * half;
    }
    return total * norm;
}

// Composite tensor GL integral of a general bivariate normal over a rectangle.
double gauss_mass_2d(const Eigen::Vector2d& mu, const Eigen::Matrix2d& inv_cov, double norm,
                     const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, int panels_x,
                     int panels_y) {
    const double step_x = (hi.x() - lo.x()) / panels_x;
    const double step_y = (hi.y() - lo.y()) / panels_y;
    double total = 0.0;
    for (int px = 0; px < panels_x; ++px) {
        const double mid_x = lo.x() + (px + 0.5) * step_x;
        for (int py = 0; py < panels_y; ++py) {
            const double mid_y = lo.y() + (py + 0.5) * step_y;
            double acc = 0.0;
            for (int nx = 0; nx < kNodes; ++nx) {
                const double dx = mid_x + 0.5 * step_x * kGlNode[nx] - mu.x();
                for (int ny = 0; ny < kNodes; ++ny) {
                    const double dy = mid_y + 0.5 * step_y * kGlNode[ny] - mu.y();
                    const double q = inv_cov(0, 0) * dx * dx + 2.0 * inv_cov(0, 1) * dx * dy +
                                     inv_cov(1, 1) * dy * dy;
                    acc += kGlWeight[nx] * kGlWeight[ny] * std::exp(-0.5 * q);
                }
            }
            total += acc * 0.25 * step_x * step_y;
        }
    }
    return total * norm;
}

void check_covariance(const Eigen::Matrix2d& cov) {
    if (!cov.allFinite() || std::abs(cov(0, 1) - cov(1, 0)) > 1e-12 * (1.0 + cov.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("covariance must be finite and symmetric");
    const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
    if (!(cov(0, 0) > 0.0) || !(det > 0.0))
        throw std::invalid_argument("covariance must be positive definite");
}

}  // namespace

GaussianMotion motion_model(const GridWorld& grid, State s, const Action& action,
                            const TimeVaryingField& field, double t, const NoiseConfig& noise) {
    const Eigen::Vector2d x = grid.state_center(s);
    const Eigen::Vector2d velocity = action.velocity() + field.query(x, t);
    GaussianMotion motion;
    motion.duration = noise.duration;
    motion.mean = velocity * noise.duration;
    motion.covariance = noise.action_covariance() + noise.disturbance_covariance();
    check_covariance(motion.covariance);
    return motion;
}

GaussianMotion motion_model_action_only(const GridWorld& grid, State s, const Action& action,
                                        const NoiseConfig& noise) {
    grid.state_center(s);  // id validation
    GaussianMotion motion;
    motion.duration = noise.duration;
    motion.mean = action.velocity() * noise.duration;
    motion.covariance = noise.action_covariance();
    check_covariance(motion.covariance);
    return motion;
}

TransitionPmf discretize(const GaussianMotion& motion, State source, const GridWorld& grid) {
    check_covariance(motion.covariance);
    const auto& neighbors = grid.neighbors(source);
    const Eigen::Vector2d mu = grid.state_center(source) + motion.mean;
    const double half = 0.5 * grid.cell_size();

    TransitionPmf pmf;
    pmf.source = source;
    pmf.entries.reserve(neighbors.size());

    const Eigen::Matrix2d& cov = motion.covariance;
    const bool diagonal = std::abs(cov(0, 1)) <= 1e-14 * std::sqrt(cov(0, 0) * cov(1, 1));

    double total = 0.0;
    if (diagonal) {
        const int px = panels_for(grid.cell_size(), std::sqrt(cov(0, 0)));
        const int py = panels_for(grid.cell_size(), std::sqrt(cov(1, 1)));
        for (const auto& nb : neighbors) {
            const Eigen::Vector2d c = grid.state_center(nb.successor);
            const double mass =
                gauss_mass_1d(mu.x(), cov(0, 0), c.x() - half, c.x() + half, px) *
                gauss_mass_1d(mu.y(), cov(1, 1), c.y() - half, c.y() + half, py);
            pmf.entries.push_back({nb.successor, mass});
            total += mass;
        }
    } else {
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
        const double sigma_min = std::sqrt(std::max(eig.eigenvalues().minCoeff(), 0.0));
        const int panels = panels_for(grid.cell_size(), sigma_min);
        const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
        Eigen::Matrix2d inv_cov;
        inv_cov << cov(1, 1), -cov(0, 1), -cov(1, 0), cov(0, 0);
        inv_cov /= det;
        const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
        const Eigen::Vector2d h(half, half);
        for (const auto& nb : neighbors) {
            const Eigen::Vector2d c = grid.state_center(nb.successor);
            const double mass = gauss_mass_2d(mu, inv_cov, norm, c - h, c + h, panels, panels);
            pmf.entries.push_back({nb.successor, mass});
            total += mass;
        }
    }

    if (total < 1e-300) {
        // Mass escaped the one-hop neighborhood entirely (near-delta Gaussian
        // with a far mean): collapse onto the successor nearest the mean.
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < neighbors.size(); ++i) {
            const double d = (grid.state_center(neighbors[i].successor) - mu).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        for (std::size_t i = 0; i < pmf.entries.size(); ++i)
            pmf.entries[i].probability = i == best ? 1.0 : 0.0;
        return pmf;
    }

    for (auto& e : pmf.entries) e.probability /= total;
    return pmf;
}

TransitionPmf action_pmf(const GridWorld& grid, State s, int action_id,
                         const TimeVaryingField& field, double t, const NoiseConfig& noise) {
    auto pmf = discretize(motion_model(grid, s, grid.actions()[action_id], field, t, noise), s, grid);
    pmf.time = t;
    return pmf;
}

TransitionPmf mixture_of(std::span<const TransitionPmf> pmfs) {
    if (pmfs.empty()) throw std::invalid_argument("mixture_of: empty PMF list");
    TransitionPmf mix = pmfs.front();
    const double w = 1.0 / static_cast<double>(pmfs.size());
    for (auto& e : mix.entries) e.probability *= w;
    for (std::size_t i = 1; i < pmfs.size(); ++i) {
        const auto& p = pmfs[i];
        if (p.entries.size() != mix.entries.size() || p.source != mix.source)
            throw std::invalid_argument("mixture_of: misaligned component PMFs");
        for (std::size_t k = 0; k < p.entries.size(); ++k)
            mix.entries[k].probability += w * p.entries[k].probability;
    }
    return mix;
}

TransitionPmf mixture_pmf(const GridWorld& grid, State s, std::span<const int> action_ids,
                          const TimeVaryingField& field, double t, const NoiseConfig& noise) {
    if (action_ids.empty()) throw std::invalid_argument("mixture_pmf: empty action list");
    std::vector<TransitionPmf> parts;
    parts.reserve(action_ids.size());
    for (int a : action_ids) parts.push_back(action_pmf(grid, s, a, field, t, noise));
    return mixture_of(parts);
}

}  // namespace tvmdp
