#ifndef MAGSTRICT_CONTRIBUTIONS_HPP
#define MAGSTRICT_CONTRIBUTIONS_HPP

#include <cmath>
#include <string>

#include "magstrict/errors.hpp"
#include "magstrict/fields.hpp"
#include "magstrict/vec.hpp"

namespace magstrict {

enum class PiKind { zero, applied_field, uniaxial_anisotropy };

/// Sign convention for the lower-order contribution pi(m) inside
/// H_eff = C_e Lap(m) + h_m - pi(m).
///
/// `literal` matches the two effective-field displays term by term, which
/// puts the applied field into pi with a plus sign: pi(m) = f - C_ani DPhi(m).
/// `physical` flips it: pi(m) = -f + C_ani DPhi(m).
enum class PiSign { literal, physical };

/// Lower-order effective-field contribution with a declared L2(Omega_T)
/// bound. The anisotropy density is the uniaxial Phi(m) = 1 - (axis.m)^2,
/// so DPhi(m) = -2 (axis.m) axis. The nonlocal strayfield is out of scope.
struct Contribution {
    PiKind kind = PiKind::zero;
    Vec3 f{0.0, 0.0, 0.0};
    Vec3 axis{0.0, 0.0, 1.0};
    double c_ani = 0.0;
    PiSign sign = PiSign::literal;
    double declared_bound = 0.0;  // NaN = derive analytically in verify_bound

    static Contribution zero() { return {}; }

    static Contribution applied_field(const Vec3& f, PiSign sign = PiSign::literal,
                                      double declared_bound = std::nan("")) {
        for (double c : f)
            if (!std::isfinite(c)) throw ConfigError("applied field must be finite");
        Contribution c;
        c.kind = PiKind::applied_field;
        c.f = f;
        c.sign = sign;
        c.declared_bound = declared_bound;
        return c;
    }

    static Contribution uniaxial_anisotropy(const Vec3& axis, double c_ani,
                                            PiSign sign = PiSign::literal,
                                            double declared_bound = std::nan("")) {
        if (std::abs(norm(axis) - 1.0) > 1e-12)
            throw ConfigError("anisotropy axis must be unit-norm");
        if (!std::isfinite(c_ani)) throw ConfigError("anisotropy constant must be finite");
        Contribution c;
        c.kind = PiKind::uniaxial_anisotropy;
        c.axis = axis;
        c.c_ani = c_ani;
        c.sign = sign;
        c.declared_bound = declared_bound;
        return c;
    }
};

/// Nodal value of pi(m) at one node.
inline Vec3 pi_at(const Contribution& pi, const Vec3& m) {
    const double flip = (pi.sign == PiSign::literal) ? 1.0 : -1.0;
    switch (pi.kind) {
        case PiKind::zero:
            return {0.0, 0.0, 0.0};
        case PiKind::applied_field:
            return flip * pi.f;
        case PiKind::uniaxial_anisotropy: {
            // pi = -C_ani DPhi(m) under the literal convention
            const Vec3 dphi = -2.0 * dot(pi.axis, m) * pi.axis;
            return (-flip * pi.c_ani) * dphi;
        }
    }
    return {0.0, 0.0, 0.0};
}

inline NodalVectorField evaluate_pi(const Contribution& pi, const NodalVectorField& m) {
    if (m.kind != FieldKind::magnetization)
        throw InvariantError("evaluate_pi expects a magnetization field");
    NodalVectorField out(*m.mesh, 3, FieldKind::general);
    for (int z = 0; z < m.mesh->n_nodes(); ++z)
        out.set_vec3(z, pi_at(pi, m.vec3_at(z)));
    return out;
}

/// Pointwise sup of |pi(n)| over unit vectors n.
inline double pi_sup_bound(const Contribution& pi) {
    switch (pi.kind) {
        case PiKind::zero:
            return 0.0;
        case PiKind::applied_field:
            return norm(pi.f);
        case PiKind::uniaxial_anisotropy:
            return 2.0 * std::abs(pi.c_ani);
    }
    return 0.0;
}

/// Analytic upper bound for ||pi(n)||^2 over L2(Omega_T) and check against
/// the declared constant. Returns the estimate.
inline double verify_bound(const Contribution& pi, double final_time, double domain_area) {
    if (!(final_time > 0.0) || !(domain_area > 0.0))
        throw ConfigError("verify_bound needs positive time horizon and domain area");
    const double sup = pi_sup_bound(pi);
    const double estimate = sup * sup * domain_area * final_time;
    if (!std::isnan(pi.declared_bound) && pi.declared_bound < estimate)
        throw InvariantError("declared pi bound " + std::to_string(pi.declared_bound) +
                             " is below the analytic estimate " + std::to_string(estimate));
    return estimate;
}

} // namespace magstrict

#endif
