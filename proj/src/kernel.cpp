#include "mixcobra/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "mixcobra/rng.hpp"

namespace mixcobra {

namespace {

constexpr double kLowerBoundTolerance = 1e-12;  // absorbs rounding at ||z|| == rho
constexpr double kTailRadius = 50.0;
constexpr double kTailTolerance = 1e-12;

double part_squared_norm(const std::vector<double>& part) {
    double total = 0.0;
    for (double v : part) total += v * v;
    return total;
}

bool all_finite(const std::vector<double>& part) {
    for (double v : part)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace

Kernel::Kernel(KernelKind kind, std::function<double(double)> profile, double c, double rho)
    : kind_(kind), custom_(std::move(profile)), lower_const_(c), lower_radius_(rho) {
    if (lower_const_ <= 0.0) throw std::invalid_argument("kernel lower bound constant must be positive");
    if (lower_radius_ <= 0.0) throw std::invalid_argument("kernel lower bound radius must be positive");
}

Kernel Kernel::gaussian() {
    return Kernel(KernelKind::gaussian, {}, std::exp(-1.0), 1.0);
}

Kernel Kernel::epanechnikov_ball() {
    return Kernel(KernelKind::epanechnikov_ball, {}, 0.5, 1.0 / std::sqrt(2.0));
}

Kernel Kernel::uniform_ball() {
    return Kernel(KernelKind::uniform_ball, {}, 1.0, 1.0);
}

Kernel Kernel::custom(std::function<double(double)> profile, double lower_const, double lower_radius) {
    if (!profile) throw std::invalid_argument("custom kernel requires a profile function");
    return Kernel(KernelKind::custom_profile, std::move(profile), lower_const, lower_radius);
}

Kernel Kernel::from_name(const std::string& name) {
    if (name == "gaussian") return gaussian();
    if (name == "epanechnikov") return epanechnikov_ball();
    if (name == "uniform") return uniform_ball();
    throw std::invalid_argument("unknown kernel '" + name + "'");
}

double Displacement::squared_norm() const {
    return part_squared_norm(input_part) + part_squared_norm(pred_part);
}

double evaluate(const Kernel& kernel, const Displacement& disp) {
    if (!all_finite(disp.input_part) || !all_finite(disp.pred_part))
        throw std::invalid_argument("invalid displacement");
    return kernel.profile(disp.squared_norm());
}

RegularityReport check_regularity(const Kernel& kernel, std::size_t dim, std::size_t sample_count) {
    if (dim == 0) throw std::invalid_argument("dimension must be positive");
    if (sample_count == 0) throw std::invalid_argument("sample count must be positive");

    const double c = kernel.lower_const();
    const double rho = kernel.lower_radius();

    RegularityReport report;
    report.lower_bound_holds = true;

    // Deterministic probes: the origin and a point on the sphere of radius rho.
    if (kernel.profile(0.0) + kLowerBoundTolerance < c) report.lower_bound_holds = false;
    if (kernel.profile(rho * rho) + kLowerBoundTolerance < c) report.lower_bound_holds = false;

    // Uniform samples inside B(0, rho): unit direction scaled by rho * U^(1/dim).
    Rng rng(0x6b65726e656cULL);
    std::vector<double> z(dim);
    for (std::size_t s = 0; s < sample_count && report.lower_bound_holds; ++s) {
        double norm_sq = 0.0;
        for (auto& v : z) {
            v = rng.normal();
            norm_sq += v * v;
        }
        if (norm_sq == 0.0) continue;
        const double radius = rho * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim));
        const double scale = radius / std::sqrt(norm_sq);
        double u = 0.0;
        for (double v : z) u += (v * scale) * (v * scale);
        if (kernel.profile(u) + kLowerBoundTolerance < c) report.lower_bound_holds = false;
    }

    report.tail_decay_ok = kernel.profile(kTailRadius * kTailRadius) <= kTailTolerance;
    return report;
}

}  // namespace mixcobra
