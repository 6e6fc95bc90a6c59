#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlsym/field.hpp"
#include "nlsym/symmetry.hpp"

namespace nlsym {

/// Conserved quantities and classification functionals of a field:
///   E     = 1/2 |grad u|_2^2 - 1/(p+1) |u|_{p+1}^{p+1}
///   M     = |u|_2^2
///   P     = Im int conj(u) grad u
///   S     = E + omega/2 M
///   K     = (2/d) |grad u|_2^2 - (p-1)/(p+1) |u|_{p+1}^{p+1}
///   J     = S - (d/4) K      (nonnegative for admissible p)
struct FunctionalReport {
    double mass = 0;
    double energy = 0;
    std::vector<double> momentum;
    double action = 0;     // S_omega
    double virial = 0;     // K
    double positive_part = 0;  // J_omega
    double gradient_sq = 0;    // |grad u|_2^2
    double potential = 0;      // |u|_{p+1}^{p+1}

    std::string csv_row(double t) const;
    static std::string csv_header(int dim);
};

/// Constants of the scaling analysis for given parameters.
struct ScalingParameters {
    double lambda0 = 0;  // rescale exponent placing the field on K = 0
    double delta = 0;    // 2(p-1-4/d) / (d(p-1+4/d))
};

double delta_gap_constant(const NlsParameters& params);

FunctionalReport evaluate(const ComplexField& f, const NlsParameters& params);

/// L2-invariant scaling flow  f -> e^{lambda} f(e^{2 lambda/d} x), realized by
/// trigonometric interpolation at the dilated points. Throws
/// UnresolvedAfterScaling when the result is no longer decayed in the box.
ComplexField scale(const ComplexField& f, double lambda, const NlsParameters& params,
                   double boundary_tol = 1e-6);

/// Exponent lambda0 with K(scale(f, lambda0)) = 0:
///   lambda0 = (p-1-4/d)^{-1} log[ (2/d)|grad f|^2 / ((p-1)/(p+1))|f|_{p+1}^{p+1} ].
double nehari_exponent(const ComplexField& f, const NlsParameters& params);

struct NehariRescale {
    ComplexField field;
    double lambda0 = 0;
};
NehariRescale rescale_to_nehari(const ComplexField& f, const NlsParameters& params);

/// Multiplies by e^{i x . xi0}; momentum shifts by mass * xi0 exactly when
/// xi0 lies on the frequency lattice 2pi/L Z^d.
ComplexField galilean_boost(const ComplexField& f, const std::vector<double>& xi0);

/// Boost with xi0 = -P(f)/M(f) snapped to the frequency lattice.
ComplexField galilean_boost_to_rest(const ComplexField& f, const NlsParameters& params);

/// Frequency-lattice snap helper (components rounded to multiples of 2pi/L).
std::vector<double> snap_to_frequency_lattice(const Grid& grid, const std::vector<double>& xi);

}  // namespace nlsym
