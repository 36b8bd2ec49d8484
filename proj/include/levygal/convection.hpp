#pragma once

#include "levygal/spaces.hpp"

namespace levygal {

struct CutoffParams {
    double R_tilde = 1.0;
    void validate() const;
};

/// Lipschitz ramp: 1 on [0, R~], 0 on [2R~, inf), affine in between.
double theta(const CutoffParams& cut, double s);

/// <B(v, w), w_j> for the skew-symmetric 1-D convection
/// B(v, w) = v w' + (1/2) v' w, which satisfies <B(v, w), w> = 0.
Coeffs assemble_B(const SpectralBasis& basis, const Coeffs& v, const Coeffs& w);

/// theta(|u|) B(u, u); exactly zero once |u| >= 2R~.
Coeffs assemble_B_cutoff(const SpectralBasis& basis, const Coeffs& u, const CutoffParams& cut);

}  // namespace levygal
