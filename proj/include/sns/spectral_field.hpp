#pragma once

#include <complex>
#include <vector>

#include "sns/grid.hpp"

namespace sns {

using Complex = std::complex<double>;

/// Divergence-free, mean-zero velocity field stored as Fourier coefficients
/// of both components on the full n x n lattice (row-major, component-wise).
///
/// The physical field at the collocation points x_j = j L / n is
///   u(x_j) = sum_k coeff(k) exp(2 pi i k . j / n),
/// so a real field corresponds to coeff(-k) = conj(coeff(k)).
struct SpectralField {
    Grid grid;
    std::vector<Complex> u1, u2;

    SpectralField() = default;
    explicit SpectralField(const Grid& g) : grid(g), u1(g.size()), u2(g.size()) {}

    Complex& c1(int k1, int k2) { return u1[grid.index(k1, k2)]; }
    Complex& c2(int k1, int k2) { return u2[grid.index(k1, k2)]; }
    Complex c1(int k1, int k2) const { return u1[grid.index(k1, k2)]; }
    Complex c2(int k1, int k2) const { return u2[grid.index(k1, k2)]; }

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

    bool same_shape(const SpectralField& o) const { return grid == o.grid; }
};

void require_same_grid(const SpectralField& a, const SpectralField& b);

}  // namespace sns
