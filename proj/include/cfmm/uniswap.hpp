#pragma once

#include <cmath>

#include "cfmm/core.hpp"

namespace cfmm {

/// Constant-product trading curve phi(R) = R1 * R2.
struct ConstantProduct {
    double evaluate(const Reserves& r) const { return r.r1 * r.r2; }
    PriceVector price_vector(const Reserves& r) const { return {r.r2, r.r1}; }
    bool in_domain(const Reserves& r) const {
        return r.finite_nonnegative() && r.r1 > 0.0 && r.r2 > 0.0;
    }
    double token2_out(const Reserves& r, double in1) const {
        return in1 * r.r2 / (r.r1 + in1);
    }
    double token1_out(const Reserves& r, double in2) const {
        return in2 * r.r1 / (r.r2 + in2);
    }
};

struct UniPool {
    Reserves reserves;
    Fee fee;

    void validate() const {
        fee.validate();
        if (!(reserves.r1 > 0.0 && reserves.r2 > 0.0))
            throw DomainError("UniPool: reserves must be strictly positive");
    }
    double price() const { return reserves.r2 / reserves.r1; }
};

/// Lambda2 = gamma*Delta1*R2 / (R1 + gamma*Delta1).
inline double uni_swap_out(const UniPool& pool, double delta1) {
    pool.validate();
    if (!(delta1 > 0.0) || !std::isfinite(delta1))
        throw DomainError("uni_swap_out: delta1 must be positive");
    const double g = pool.fee.gamma;
    return g * delta1 * pool.reserves.r2 / (pool.reserves.r1 + g * delta1);
}

/// dLambda2/dDelta1 = gamma*R1*R2 / (R1 + gamma*Delta1)^2.
inline double uni_price_impact(const UniPool& pool, double delta1) {
    pool.validate();
    if (!(delta1 >= 0.0) || !std::isfinite(delta1))
        throw DomainError("uni_price_impact: delta1 must be nonnegative");
    const double g = pool.fee.gamma;
    const double denom = pool.reserves.r1 + g * delta1;
    return g * pool.reserves.r1 * pool.reserves.r2 / (denom * denom);
}

/// Directional derivative of the reported price along the invariant-curve
/// tangent J*P = (-R1, R2): equals 2p.
inline double uni_directional_price_derivative(const UniPool& pool) {
    pool.validate();
    return 2.0 * pool.price();
}

}  // namespace cfmm
