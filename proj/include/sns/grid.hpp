#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sns {

/// Truncated Fourier lattice for the periodic box [0, L]^2.
///
/// Wavevectors are integer pairs k with |k_i| <= n_modes/2; physical
/// wavenumbers are k scaled by 2*pi/L. Quadratic nonlinearities are
/// dealiased by the 2/3 rule: only |k_i| <= dealias_cutoff is retained.
struct Grid {
    int n_modes = 0;
    double box_length = 0.0;
    int dealias_cutoff = 0;

    double wavenumber_unit() const { return 2.0 * std::numbers::pi / box_length; }

    /// Signed wavevector component for storage row/column i in [0, n).
    int wrap(int i) const { return i <= n_modes / 2 ? i : i - n_modes; }

    /// Storage row/column for a signed wavevector component.
    int unwrap(int k) const { return k >= 0 ? k : k + n_modes; }

    int size() const { return n_modes * n_modes; }

    int index(int k1, int k2) const { return unwrap(k1) * n_modes + unwrap(k2); }

    bool dealiased(int k1, int k2) const {
        return std::abs(k1) <= dealias_cutoff && std::abs(k2) <= dealias_cutoff;
    }

    bool operator==(const Grid&) const = default;
};

inline Grid make_grid(int n_modes, double box_length) {
    if (n_modes < 4) throw std::invalid_argument("make_grid: n_modes must be >= 4");
    if (n_modes % 2 != 0) throw std::invalid_argument("make_grid: n_modes must be even");
    if (!(box_length > 0.0)) throw std::invalid_argument("make_grid: box_length must be positive");
    return Grid{n_modes, box_length, n_modes / 3};
}

}  // namespace sns
