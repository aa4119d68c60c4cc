#include "sns/operators.hpp"

#include <algorithm>
#include <cmath>

#include "sns/fft.hpp"

namespace sns {

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_same_grid(*this, o);
    for (size_t i = 0; i < u1.size(); ++i) u1[i] += o.u1[i];
    for (size_t i = 0; i < u2.size(); ++i) u2[i] += o.u2[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    require_same_grid(*this, o);
    for (size_t i = 0; i < u1.size(); ++i) u1[i] -= o.u1[i];
    for (size_t i = 0; i < u2.size(); ++i) u2[i] -= o.u2[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& c : u1) c *= s;
    for (auto& c : u2) c *= s;
    return *this;
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("fields live on different grids");
}

void add_scaled(SpectralField& a, const SpectralField& b, double s) {
    require_same_grid(a, b);
    for (size_t i = 0; i < a.u1.size(); ++i) a.u1[i] += s * b.u1[i];
    for (size_t i = 0; i < a.u2.size(); ++i) a.u2[i] += s * b.u2[i];
}

SpectralField leray_project(SpectralField f) {
    const int n = f.grid.n_modes;
    for (int i = 0; i < n; ++i) {
        const double k1 = f.grid.wrap(i);
        for (int j = 0; j < n; ++j) {
            const double k2 = f.grid.wrap(j);
            const size_t idx = static_cast<size_t>(i) * n + j;
            const double ksq = k1 * k1 + k2 * k2;
            if (ksq == 0.0) {
                f.u1[idx] = 0.0;
                f.u2[idx] = 0.0;
                continue;
            }
            const Complex dot = (k1 * f.u1[idx] + k2 * f.u2[idx]) / ksq;
            f.u1[idx] -= dot * k1;
            f.u2[idx] -= dot * k2;
        }
    }
    return f;
}

SpectralField stokes_apply(const SpectralField& u) {
    SpectralField out(u.grid);
    const int n = u.grid.n_modes;
    const double unit2 = u.grid.wavenumber_unit() * u.grid.wavenumber_unit();
    for (int i = 0; i < n; ++i) {
        const double k1 = u.grid.wrap(i);
        for (int j = 0; j < n; ++j) {
            const double k2 = u.grid.wrap(j);
            const size_t idx = static_cast<size_t>(i) * n + j;
            const double lam = (k1 * k1 + k2 * k2) * unit2;
            out.u1[idx] = lam * u.u1[idx];
            out.u2[idx] = lam * u.u2[idx];
        }
    }
    return out;
}

void dealias(SpectralField& f) {
    const int n = f.grid.n_modes;
    const int c = f.grid.dealias_cutoff;
    for (int i = 0; i < n; ++i) {
        const int k1 = f.grid.wrap(i);
        for (int j = 0; j < n; ++j) {
            const int k2 = f.grid.wrap(j);
            if (std::abs(k1) > c || std::abs(k2) > c) {
                const size_t idx = static_cast<size_t>(i) * n + j;
                f.u1[idx] = 0.0;
                f.u2[idx] = 0.0;
            }
        }
    }
}

SpectralField bilinear_b(const SpectralField& u, const SpectralField& v) {
    require_same_grid(u, v);
    const Grid& g = u.grid;
    const int n = g.n_modes;
    const size_t nn = static_cast<size_t>(n) * n;
    const double unit = g.wavenumber_unit();

    auto& pu1 = fft_scratch(n, 0);
    auto& pu2 = fft_scratch(n, 1);
    auto& d1 = fft_scratch(n, 2);
    auto& d2 = fft_scratch(n, 3);
    auto& w1 = fft_scratch(n, 4);
    auto& w2 = fft_scratch(n, 5);
    auto& tmp = fft_scratch(n, 6);

    spectral_to_physical(n, u.u1.data(), pu1.data());
    spectral_to_physical(n, u.u2.data(), pu2.data());

    // (u . grad) v, one component of v at a time.
    const std::vector<Complex>* vc[2] = {&v.u1, &v.u2};
    std::vector<Complex>* out[2] = {&w1, &w2};
    for (int comp = 0; comp < 2; ++comp) {
        for (int i = 0; i < n; ++i) {
            const double k1 = g.wrap(i) * unit;
            for (int j = 0; j < n; ++j) {
                const size_t idx = static_cast<size_t>(i) * n + j;
                tmp[idx] = Complex(0.0, k1) * (*vc[comp])[idx];
            }
        }
        spectral_to_physical(n, tmp.data(), d1.data());
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double k2 = g.wrap(j) * unit;
                const size_t idx = static_cast<size_t>(i) * n + j;
                tmp[idx] = Complex(0.0, k2) * (*vc[comp])[idx];
            }
        }
        spectral_to_physical(n, tmp.data(), d2.data());
        for (size_t idx = 0; idx < nn; ++idx)
            (*out[comp])[idx] = pu1[idx] * d1[idx] + pu2[idx] * d2[idx];
    }

    SpectralField result(g);
    physical_to_spectral(n, w1.data(), result.u1.data());
    physical_to_spectral(n, w2.data(), result.u2.data());
    dealias(result);
    return leray_project(std::move(result));
}

double inner_l2(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    const double area = a.grid.box_length * a.grid.box_length;
    double s = 0.0;
    for (size_t i = 0; i < a.u1.size(); ++i)
        s += (a.u1[i] * std::conj(b.u1[i]) + a.u2[i] * std::conj(b.u2[i])).real();
    return area * s;
}

double trilinear_form(const SpectralField& u, const SpectralField& v, const SpectralField& w) {
    return inner_l2(bilinear_b(u, v), w);
}

double norm_l2(const SpectralField& u) {
    const double s = inner_l2(u, u);
    return std::sqrt(s < 0.0 ? 0.0 : s);  // clamp roundoff only; NaN propagates
}

double norm_grad_l2(const SpectralField& u) {
    const double area = u.grid.box_length * u.grid.box_length;
    const double unit2 = u.grid.wavenumber_unit() * u.grid.wavenumber_unit();
    const int n = u.grid.n_modes;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double k1 = u.grid.wrap(i);
        for (int j = 0; j < n; ++j) {
            const double k2 = u.grid.wrap(j);
            const size_t idx = static_cast<size_t>(i) * n + j;
            s += (k1 * k1 + k2 * k2) * unit2 * (std::norm(u.u1[idx]) + std::norm(u.u2[idx]));
        }
    }
    return std::sqrt(area * s);
}

NormBundle norm_bundle(const SpectralField& u) {
    const Grid& g = u.grid;
    const int n = g.n_modes;
    const double area = g.box_length * g.box_length;
    const double unit2 = g.wavenumber_unit() * g.wavenumber_unit();

    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double k1 = g.wrap(i);
        for (int j = 0; j < n; ++j) {
            const double k2 = g.wrap(j);
            const size_t idx = static_cast<size_t>(i) * n + j;
            const double e = std::norm(u.u1[idx]) + std::norm(u.u2[idx]);
            const double lam = (k1 * k1 + k2 * k2) * unit2;
            s0 += e;
            s1 += lam * e;
            s2 += lam * lam * e;
        }
    }

    NormBundle nb;
    nb.l2 = std::sqrt(area * s0);
    nb.grad_l2 = std::sqrt(area * s1);
    nb.stokes_l2 = std::sqrt(area * s2);
    nb.v = std::sqrt(area * (s0 + s1));
    nb.triple = std::sqrt(area * (s1 + s2));

    auto& p1 = fft_scratch(n, 0);
    auto& p2 = fft_scratch(n, 1);
    spectral_to_physical(n, u.u1.data(), p1.data());
    spectral_to_physical(n, u.u2.data(), p2.data());
    const double cell = area / (static_cast<double>(n) * n);
    double q = 0.0;
    for (size_t idx = 0; idx < static_cast<size_t>(n) * n; ++idx) {
        const double m2 = std::norm(p1[idx]) + std::norm(p2[idx]);
        q += m2 * m2;
    }
    nb.l4 = std::pow(cell * q, 0.25);
    nb.x_norm = nb.l4;
    return nb;
}

double physical_l2(const SpectralField& u) {
    const int n = u.grid.n_modes;
    auto& p1 = fft_scratch(n, 0);
    auto& p2 = fft_scratch(n, 1);
    spectral_to_physical(n, u.u1.data(), p1.data());
    spectral_to_physical(n, u.u2.data(), p2.data());
    const double cell =
        u.grid.box_length * u.grid.box_length / (static_cast<double>(n) * n);
    double s = 0.0;
    for (size_t idx = 0; idx < static_cast<size_t>(n) * n; ++idx)
        s += std::norm(p1[idx]) + std::norm(p2[idx]);
    return std::sqrt(cell * s);
}

double divergence_defect(const SpectralField& f) {
    const int n = f.grid.n_modes;
    double max_dot = 0.0, max_coeff = 0.0;
    for (int i = 0; i < n; ++i) {
        const double k1 = f.grid.wrap(i);
        for (int j = 0; j < n; ++j) {
            const double k2 = f.grid.wrap(j);
            const size_t idx = static_cast<size_t>(i) * n + j;
            max_dot = std::max(max_dot, std::abs(k1 * f.u1[idx] + k2 * f.u2[idx]));
            max_coeff = std::max(max_coeff, std::max(std::abs(f.u1[idx]), std::abs(f.u2[idx])));
        }
    }
    return max_coeff == 0.0 ? 0.0 : max_dot / max_coeff;
}

double hermitian_defect(const SpectralField& f) {
    const int n = f.grid.n_modes;
    double max_def = 0.0, max_coeff = 0.0;
    for (int i = 0; i < n; ++i) {
        const int mi = (n - i) % n;
        for (int j = 0; j < n; ++j) {
            const int mj = (n - j) % n;
            const size_t idx = static_cast<size_t>(i) * n + j;
            const size_t midx = static_cast<size_t>(mi) * n + mj;
            max_def = std::max(max_def, std::abs(f.u1[midx] - std::conj(f.u1[idx])));
            max_def = std::max(max_def, std::abs(f.u2[midx] - std::conj(f.u2[idx])));
            max_coeff = std::max(max_coeff, std::max(std::abs(f.u1[idx]), std::abs(f.u2[idx])));
        }
    }
    return max_coeff == 0.0 ? 0.0 : max_def / max_coeff;
}

}  // namespace sns
