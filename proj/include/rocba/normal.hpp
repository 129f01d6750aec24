#pragma once

#include <cmath>
#include <numbers>

namespace rocba {

/// Standard normal CDF through erfc, which keeps full relative precision in
/// the lower tail down to underflow (absolute error well below 1e-15).
template <typename Scalar>
Scalar normal_cdf(Scalar z) {
    using std::erfc;
    return Scalar(0.5) * erfc(-z / std::numbers::sqrt2_v<Scalar>);
}

/// log Phi(z) without underflow. Below z = -30 erfc underflows in double, so
/// the Mills-ratio asymptotic series takes over (truncation error ~ 1e-12
/// relative at the switch point, smaller further out).
template <typename Scalar>
Scalar log_normal_cdf(Scalar z) {
    using std::log;
    using std::log1p;
    if (z > Scalar(-30)) {
        if (z > Scalar(5)) return log1p(-normal_cdf(-z));
        return log(normal_cdf(z));
    }
    const Scalar inv2 = Scalar(1) / (z * z);
    const Scalar series =
        Scalar(1) - inv2 * (Scalar(1) - Scalar(3) * inv2 * (Scalar(1) - Scalar(5) * inv2 * (Scalar(1) - Scalar(7) * inv2)));
    return -Scalar(0.5) * z * z - log(-z) - Scalar(0.5) * log(Scalar(2) * std::numbers::pi_v<Scalar>) + log(series);
}

} // namespace rocba
