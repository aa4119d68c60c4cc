#include "sns/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "sns/operators.hpp"
#include "sns/rng.hpp"

namespace sns {

SpectralField taylor_green_field(const Grid& grid, double amplitude) {
    SpectralField f(grid);
    const Complex iq(0.0, 0.25 * amplitude);
    // sin(kx1) cos(kx2):  -i/4 at (1,+-1), +i/4 at (-1,+-1)
    f.c1(1, 1) = -iq;
    f.c1(1, -1) = -iq;
    f.c1(-1, 1) = iq;
    f.c1(-1, -1) = iq;
    // -cos(kx1) sin(kx2): +i/4 at (+-1,1), -i/4 at (+-1,-1)
    f.c2(1, 1) = iq;
    f.c2(-1, 1) = iq;
    f.c2(1, -1) = -iq;
    f.c2(-1, -1) = -iq;
    return f;
}

SpectralField random_solenoidal_field(const Grid& grid, double decay, std::uint64_t seed,
                                      std::uint32_t stream) {
    if (!(decay >= 0.0)) throw std::invalid_argument("random field: decay must be >= 0");
    SpectralField f(grid);
    const int c = grid.dealias_cutoff;
    for (int k1 = 0; k1 <= c; ++k1) {
        for (int k2 = (k1 == 0 ? 1 : -c); k2 <= c; ++k2) {
            const double mag = std::sqrt(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
            const auto [g1, g2] = gaussian_pair(
                seed, {static_cast<std::uint32_t>(k1 + c), static_cast<std::uint32_t>(k2 + c),
                       stream, 2u});
            const Complex xi = Complex(g1, g2) * std::pow(mag, -decay);
            const double e1 = -k2 / mag, e2 = k1 / mag;
            f.c1(k1, k2) = xi * e1;
            f.c2(k1, k2) = xi * e2;
            f.c1(-k1, -k2) = std::conj(xi) * e1;
            f.c2(-k1, -k2) = std::conj(xi) * e2;
        }
    }
    return f;
}

SpectralField make_initial_condition(const Grid& grid, const InitSpec& spec) {
    switch (spec.kind) {
        case InitSpec::Kind::zero: return SpectralField(grid);
        case InitSpec::Kind::taylor_green: return taylor_green_field(grid, spec.amplitude);
        case InitSpec::Kind::random_smooth: {
            SpectralField f = random_solenoidal_field(grid, spec.decay, spec.seed);
            const double n = norm_l2(f);
            if (n > 0.0) f *= spec.amplitude / n;
            return f;
        }
    }
    throw std::logic_error("unknown initial condition kind");
}

}  // namespace sns
