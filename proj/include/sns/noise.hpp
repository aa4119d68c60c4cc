#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sns/spectral_field.hpp"

namespace sns {

enum class GKind { additive, scalar_multiplicative };

/// Bounded, Lipschitz scalar modulation m used by the multiplicative
/// coefficient G(u) = sigma * m(|u|_{L2}) * Q^{1/2}.
enum class Modulation { sine, tanh_sat, constant };

struct NoiseMode {
    int k1, k2;
    int lattice_index;    ///< position in the full n x n storage
    int mirror;           ///< index of (-k1, -k2) in the mode list
    int canonical_ordinal;  ///< RNG stream id of the canonical representative
    bool canonical;
    double dir1, dir2;    ///< unit tangential direction, shared with the mirror
    double lambda;        ///< covariance eigenvalue of Q at this mode
};

/// Trace-class covariance spectrum lambda_k = a |k|^{-2s} on the dealiased
/// lattice (zero mode excluded) plus the diffusion-coefficient kind and its
/// growth/Lipschitz constants.
struct NoiseModel {
    Grid grid;
    GKind kind = GKind::additive;
    double sigma = 1.0;
    Modulation modulation = Modulation::sine;
    double modulation_constant = 1.0;
    std::vector<NoiseMode> modes;
    double trace_q = 0.0;
    double k0 = 0.0, k1 = 0.0, l1 = 0.0;

    int n_retained() const { return static_cast<int>(modes.size()); }
    double modulate(double x) const;
    /// sigma * m(|u|_{L2}) for the multiplicative kind, 1 for additive.
    double scale_for(const SpectralField& u) const;
};

NoiseModel build_noise_model(const Grid& grid, double amplitude, double exponent, GKind kind,
                             double sigma = 1.0, Modulation modulation = Modulation::sine,
                             double modulation_constant = 1.0);

/// Hilbert-Schmidt norm squared of G(u) in the H-valued sense,
/// scale(u)^2 * trace(Q); satisfies the (G1) growth bound by construction.
double g_hs_norm_sq(const NoiseModel& model, const SpectralField& u);

using IncrementRow = std::span<const Complex>;

/// Seeded per-mode Brownian increments on the finest grid. Increments are
/// complex with per-mode variance lambda_k * dt_fine and Hermitian pairing
/// increments(-k) = conj(increments(k)); the pair shares one tangential
/// direction so the mapped field is real.
struct WienerPath {
    std::uint64_t seed = 0;
    int n_fine = 0;
    double dt_fine = 0.0;
    int n_modes = 0;  ///< retained modes per step
    std::vector<Complex> increments;  ///< step-major, [step * n_modes + mode]

    IncrementRow row(int step) const {
        return {increments.data() + static_cast<size_t>(step) * n_modes,
                static_cast<size_t>(n_modes)};
    }
};

/// Contiguous run of fine steps of one path, the resolution a single
/// coarse step sees.
struct PathSlice {
    const WienerPath* path = nullptr;
    int first = 0;
    int count = 0;

    IncrementRow row(int j) const { return path->row(first + j); }
    double dt() const { return path->dt_fine; }
};

WienerPath sample_wiener_path(const NoiseModel& model, double horizon, int n_fine,
                              std::uint64_t seed);

/// Exact ascending-order sums of fine increments; bit-reproducible.
WienerPath coarsen_path(const WienerPath& path, int factor);

/// Sum a slice's increments into one row (ascending order).
std::vector<Complex> total_increment(const PathSlice& slice);

/// G(u) dW as a divergence-free mean-zero field.
SpectralField apply_g(const NoiseModel& model, const SpectralField& u, IncrementRow dW);

/// Path dump: "SNSW", u64 seed, u32 n_fine, f64 dt_fine, then increments as
/// little-endian f64 (re, im) in (step, mode) order.
void write_path(const std::string& file, const WienerPath& path);
WienerPath read_path(const std::string& file);

}  // namespace sns
