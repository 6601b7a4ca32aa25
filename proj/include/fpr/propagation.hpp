#pragma once

#include <cmath>
#include <stdexcept>

#include "fpr/errors.hpp"
#include "fpr/geometry.hpp"

namespace fpr {

// Pure pathloss: channel attenuation variance d(z) = ||z - b||^-kappa.
struct PropagationModel {
    double kappa = 3.5;

    explicit PropagationModel(double kappa_) : kappa(kappa_) {
        if (!(kappa >= 2.0)) throw std::invalid_argument("PropagationModel: kappa must be >= 2");
    }
};

// Uplink power control p = rho / d(z). Only the ratio rho/sigma^2 ever
// enters the SINR expressions.
struct PowerControlPolicy {
    double rho_over_sigma2 = 10.0;

    explicit PowerControlPolicy(double snr_linear) : rho_over_sigma2(snr_linear) {
        if (!(snr_linear > 0.0)) throw std::invalid_argument("PowerControlPolicy: SNR must be > 0");
    }
    double inv_snr() const { return 1.0 / rho_over_sigma2; }
};

inline double variance(const PropagationModel& m, Vec2 z, Vec2 b) {
    const double d2 = distance2(z, b);
    if (d2 == 0.0) throw singularity_error("variance: user coincides with BS");
    return std::pow(d2, -0.5 * m.kappa);
}

// Relative interference strength (d_victim(z)/d_serving(z))^gamma
//   = (||z - b_serving|| / ||z - b_victim||)^(gamma*kappa).
inline double relative_strength(const PropagationModel& m, Vec2 z, Vec2 b_serving, Vec2 b_victim,
                                int gamma) {
    if (gamma != 1 && gamma != 2) throw std::invalid_argument("relative_strength: gamma in {1,2}");
    const double ds2 = distance2(z, b_serving);
    const double dv2 = distance2(z, b_victim);
    if (ds2 == 0.0 || dv2 == 0.0) throw singularity_error("relative_strength: user coincides with BS");
    return std::pow(ds2 / dv2, 0.5 * gamma * m.kappa);
}

}  // namespace fpr
