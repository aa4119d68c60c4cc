#pragma once

#include "sns/spectral_field.hpp"

namespace sns {

/// L2, V and interpolation-space norms of a field.
/// Spectral norms come from the Parseval sum; the L4 norm is evaluated on
/// the collocation grid (exact up to aliasing of |u|^4).
struct NormBundle {
    double l2 = 0.0;         ///< |u|_{L2}
    double grad_l2 = 0.0;    ///< |grad u|_{L2}
    double v = 0.0;          ///< (l2^2 + grad_l2^2)^{1/2}
    double l4 = 0.0;         ///< ||u||_{L4}
    double stokes_l2 = 0.0;  ///< |A u|_{L2}
    double x_norm = 0.0;     ///< ||u||_X = ||u||_{L4} on H ∩ L4
    double triple = 0.0;     ///< (grad_l2^2 + stokes_l2^2)^{1/2}
};

/// Mode-wise projection I - k k^T / |k|^2 onto divergence-free fields;
/// the zero mode is pinned to zero.
SpectralField leray_project(SpectralField f);

/// Stokes operator A = -Laplacian: coefficient k scaled by |k|^2 (2 pi / L)^2.
SpectralField stokes_apply(const SpectralField& u);

/// Dealiased pseudo-spectral Leray projection of (u . grad) v.
SpectralField bilinear_b(const SpectralField& u, const SpectralField& v);

/// b(u, v, w) = <B(u, v), w> via the L2 pairing.
double trilinear_form(const SpectralField& u, const SpectralField& v, const SpectralField& w);

NormBundle norm_bundle(const SpectralField& u);

/// Real L2 inner product (u, v) = integral of u . v over the box.
double inner_l2(const SpectralField& a, const SpectralField& b);

double norm_l2(const SpectralField& u);
double norm_grad_l2(const SpectralField& u);

/// Zero every mode with |k_i| > dealias_cutoff.
void dealias(SpectralField& f);

/// |u|_{L2} evaluated by collocation-grid quadrature (Parseval partner of
/// the spectral sum in norm_bundle).
double physical_l2(const SpectralField& u);

/// max_k |k . coeff(k)| over max_k |coeff(k)| (0 for the zero field).
double divergence_defect(const SpectralField& f);

/// max_k |coeff(-k) - conj(coeff(k))| over max_k |coeff(k)|.
double hermitian_defect(const SpectralField& f);

/// a + s * b without touching a's other modes.
void add_scaled(SpectralField& a, const SpectralField& b, double s);

}  // namespace sns
