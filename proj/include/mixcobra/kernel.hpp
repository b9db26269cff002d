#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace mixcobra {

enum class KernelKind { gaussian, epanechnikov_ball, uniform_ball, custom_profile };

// Radial kernel on the joint input/prediction displacement space, expressed
// through its profile H: K(z) = H(||z||^2). Each kernel carries the constants
// (c, rho) of its lower bound K(z) >= c on the ball ||z|| <= rho.
class Kernel {
public:
    static Kernel gaussian();           // H(u) = exp(-u),      c = exp(-1), rho = 1
    static Kernel epanechnikov_ball();  // H(u) = max(0, 1-u),  c = 0.5,     rho = 1/sqrt(2)
    static Kernel uniform_ball();       // H(u) = 1{u <= 1},    c = 1,       rho = 1
    static Kernel custom(std::function<double(double)> profile, double lower_const,
                         double lower_radius);

    static Kernel from_name(const std::string& name);

    // Profile evaluated at a squared norm u >= 0.
    double profile(double u) const {
        switch (kind_) {
        case KernelKind::gaussian: return std::exp(-u);
        case KernelKind::epanechnikov_ball: return u < 1.0 ? 1.0 - u : 0.0;
        case KernelKind::uniform_ball: return u <= 1.0 ? 1.0 : 0.0;
        case KernelKind::custom_profile: return custom_(u);
        }
        return 0.0;
    }

    KernelKind kind() const { return kind_; }
    double lower_const() const { return lower_const_; }
    double lower_radius() const { return lower_radius_; }

private:
    Kernel(KernelKind kind, std::function<double(double)> profile, double c, double rho);

    KernelKind kind_;
    std::function<double(double)> custom_;
    double lower_const_;
    double lower_radius_;
};

// Scaled displacement between a training point and a query in the joint
// space: ((X_i - x)/alpha, (f(X_i) - f(x))/beta).
struct Displacement {
    std::vector<double> input_part;
    std::vector<double> pred_part;

    double squared_norm() const;
};

// K applied to the displacement: H(||input||^2 + ||pred||^2).
// Throws std::invalid_argument on non-finite components.
double evaluate(const Kernel& kernel, const Displacement& disp);

struct RegularityReport {
    bool lower_bound_holds = false;
    bool tail_decay_ok = false;
};

// Numerical check that the kernel is regular: samples the ball B(0, rho)
// to confirm K >= c there, and confirms the profile decays below 1e-12
// beyond radius 50 as a proxy for the integrable-envelope condition.
RegularityReport check_regularity(const Kernel& kernel, std::size_t dim, std::size_t sample_count);

}  // namespace mixcobra
