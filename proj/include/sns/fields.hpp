#pragma once

#include <cstdint>

#include "sns/spectral_field.hpp"

namespace sns {

/// Taylor-Green vortex u = a (sin(kx1) cos(kx2), -cos(kx1) sin(kx2)),
/// k = 2 pi / L: an exact decaying solution of the deterministic flow,
/// u(t) = exp(-2 nu k^2 t) u0.
SpectralField taylor_green_field(const Grid& grid, double amplitude);

/// Random divergence-free mean-zero field with coefficient decay |k|^{-decay}
/// on the dealiased lattice; deterministic given (seed, stream).
SpectralField random_solenoidal_field(const Grid& grid, double decay, std::uint64_t seed,
                                      std::uint32_t stream = 0);

struct InitSpec {
    enum class Kind { zero, taylor_green, random_smooth };
    Kind kind = Kind::zero;
    double amplitude = 1.0;
    double decay = 3.0;
    std::uint64_t seed = 2024;
};

/// random_smooth fields are normalized to |u|_{L2} = amplitude.
SpectralField make_initial_condition(const Grid& grid, const InitSpec& spec);

}  // namespace sns
