#include "levygal/convection.hpp"

#include <algorithm>

namespace levygal {

void CutoffParams::validate() const {
    if (!(R_tilde >= 1.0)) throw SpaceError("cutoff level R~ must be at least 1");
}

double theta(const CutoffParams& cut, double s) {
    return std::clamp(2.0 - s / cut.R_tilde, 0.0, 1.0);
}

Coeffs assemble_B(const SpectralBasis& basis, const Coeffs& v, const Coeffs& w) {
    if (basis.dim() != 1) throw SpaceError("the convection surrogate is defined on 1-D bases only");
    const auto& phi = basis.table(Channel::value);
    const auto& dphi = basis.table(Channel::gradient, 0);
    const Eigen::VectorXd vq = phi * v, dvq = dphi * v;
    const Eigen::VectorXd wq = phi * w, dwq = dphi * w;
    const Eigen::VectorXd integrand = (vq.cwiseProduct(dwq) + 0.5 * dvq.cwiseProduct(wq)).cwiseProduct(basis.weights());
    return phi.transpose() * integrand;
}

Coeffs assemble_B_cutoff(const SpectralBasis& basis, const Coeffs& u, const CutoffParams& cut) {
    cut.validate();
    const double factor = theta(cut, h_norm(u));
    if (factor == 0.0) {
        if (basis.dim() != 1) throw SpaceError("the convection surrogate is defined on 1-D bases only");
        return Coeffs::Zero(basis.size());
    }
    Coeffs b = assemble_B(basis, u, u);
    if (factor != 1.0) b *= factor;
    return b;
}

}  // namespace levygal
