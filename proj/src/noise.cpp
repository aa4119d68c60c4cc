#include "sns/noise.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "sns/field_io.hpp"
#include "sns/operators.hpp"
#include "sns/rng.hpp"

namespace sns {

double NoiseModel::modulate(double x) const {
    switch (modulation) {
        case Modulation::sine: return std::sin(x);
        case Modulation::tanh_sat: return std::tanh(x);
        case Modulation::constant: return modulation_constant;
    }
    return 0.0;
}

double NoiseModel::scale_for(const SpectralField& u) const {
    if (kind == GKind::additive) return 1.0;
    return sigma * modulate(norm_l2(u));
}

NoiseModel build_noise_model(const Grid& grid, double amplitude, double exponent, GKind kind,
                             double sigma, Modulation modulation, double modulation_constant) {
    if (amplitude < 0.0) throw std::invalid_argument("build_noise_model: amplitude must be >= 0");
    if (exponent < 0.0) throw std::invalid_argument("build_noise_model: exponent must be >= 0");
    if (sigma < 0.0) throw std::invalid_argument("build_noise_model: sigma must be >= 0");

    NoiseModel m;
    m.grid = grid;
    m.kind = kind;
    m.sigma = sigma;
    m.modulation = modulation;
    m.modulation_constant = modulation_constant;

    const int c = grid.dealias_cutoff;
    auto canonical = [](int k1, int k2) { return k1 > 0 || (k1 == 0 && k2 > 0); };
    auto list_index = [c](int k1, int k2) {
        // row-major over the (2c+1)^2 block, zero mode skipped
        int idx = (k1 + c) * (2 * c + 1) + (k2 + c);
        const int zero = c * (2 * c + 1) + c;
        if (idx == zero) return -1;
        return idx > zero ? idx - 1 : idx;
    };

    int next_ordinal = 0;
    for (int k1 = -c; k1 <= c; ++k1) {
        for (int k2 = -c; k2 <= c; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            NoiseMode mode;
            mode.k1 = k1;
            mode.k2 = k2;
            mode.lattice_index = grid.index(k1, k2);
            mode.mirror = list_index(-k1, -k2);
            mode.canonical = canonical(k1, k2);
            const int ck1 = mode.canonical ? k1 : -k1;
            const int ck2 = mode.canonical ? k2 : -k2;
            const double mag = std::sqrt(static_cast<double>(ck1) * ck1 + static_cast<double>(ck2) * ck2);
            mode.dir1 = -ck2 / mag;
            mode.dir2 = ck1 / mag;
            mode.canonical_ordinal = mode.canonical ? next_ordinal++ : -1;
            mode.lambda =
                amplitude * std::pow(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2,
                                     -exponent);
            m.modes.push_back(mode);
        }
    }
    // mirrors get the ordinal of their canonical partner
    for (auto& mode : m.modes)
        if (!mode.canonical) mode.canonical_ordinal = m.modes[mode.mirror].canonical_ordinal;

    double tr = 0.0;
    for (const auto& mode : m.modes) tr += mode.lambda;
    m.trace_q = tr;

    if (kind == GKind::additive) {
        m.k0 = tr;
        m.k1 = 0.0;
        m.l1 = 0.0;
    } else {
        double sup_m = 1.0, lip_m = 1.0;
        if (modulation == Modulation::constant) {
            sup_m = std::abs(modulation_constant);
            lip_m = 0.0;
        }
        m.k0 = sigma * sigma * sup_m * sup_m * tr;
        m.k1 = 0.0;
        m.l1 = sigma * sigma * lip_m * lip_m * tr;
    }
    return m;
}

double g_hs_norm_sq(const NoiseModel& model, const SpectralField& u) {
    const double s = model.scale_for(u);
    return s * s * model.trace_q;
}

WienerPath sample_wiener_path(const NoiseModel& model, double horizon, int n_fine,
                              std::uint64_t seed) {
    if (n_fine < 1) throw std::invalid_argument("sample_wiener_path: n_fine must be >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("sample_wiener_path: horizon must be positive");

    WienerPath p;
    p.seed = seed;
    p.n_fine = n_fine;
    p.dt_fine = horizon / n_fine;
    p.n_modes = model.n_retained();
    p.increments.assign(static_cast<size_t>(n_fine) * p.n_modes, Complex(0.0, 0.0));

    // Increments are snapped to a per-mode dyadic grid (2^-26 relative to the
    // step standard deviation). All partial sums of grid values are exact in
    // double precision, so coarsening is exactly associative regardless of
    // how the coarsening factor is split.
    for (int step = 0; step < n_fine; ++step) {
        Complex* row = p.increments.data() + static_cast<size_t>(step) * p.n_modes;
        for (int mi = 0; mi < p.n_modes; ++mi) {
            const NoiseMode& mode = model.modes[mi];
            if (!mode.canonical) continue;
            const double sd = std::sqrt(0.5 * mode.lambda * p.dt_fine);
            const auto [g1, g2] = gaussian_pair(
                seed, {static_cast<std::uint32_t>(step),
                       static_cast<std::uint32_t>(mode.canonical_ordinal), 0u, 1u});
            Complex xi(sd * g1, sd * g2);
            if (sd > 0.0) {
                const double grid = std::scalbn(1.0, std::ilogb(sd) - 26);
                xi = Complex(std::nearbyint(xi.real() / grid) * grid,
                             std::nearbyint(xi.imag() / grid) * grid);
            }
            row[mi] = xi;
            row[mode.mirror] = std::conj(xi);
        }
    }
    return p;
}

WienerPath coarsen_path(const WienerPath& path, int factor) {
    if (factor < 1 || path.n_fine % factor != 0)
        throw std::invalid_argument("coarsen_path: factor must divide n_fine");
    WienerPath c;
    c.seed = path.seed;
    c.n_fine = path.n_fine / factor;
    c.dt_fine = path.dt_fine * factor;
    c.n_modes = path.n_modes;
    c.increments.assign(static_cast<size_t>(c.n_fine) * c.n_modes, Complex(0.0, 0.0));
    for (int j = 0; j < c.n_fine; ++j) {
        Complex* out = c.increments.data() + static_cast<size_t>(j) * c.n_modes;
        for (int r = 0; r < factor; ++r) {
            const Complex* in =
                path.increments.data() + static_cast<size_t>(j * factor + r) * c.n_modes;
            for (int m = 0; m < c.n_modes; ++m) out[m] += in[m];
        }
    }
    return c;
}

std::vector<Complex> total_increment(const PathSlice& slice) {
    std::vector<Complex> total(static_cast<size_t>(slice.path->n_modes), Complex(0.0, 0.0));
    for (int j = 0; j < slice.count; ++j) {
        const auto row = slice.row(j);
        for (size_t m = 0; m < total.size(); ++m) total[m] += row[m];
    }
    return total;
}

SpectralField apply_g(const NoiseModel& model, const SpectralField& u, IncrementRow dW) {
    if (!(u.grid == model.grid)) throw std::invalid_argument("apply_g: grid mismatch");
    if (static_cast<int>(dW.size()) != model.n_retained())
        throw std::invalid_argument("apply_g: increment row does not match the model");

    // Increments are coordinates on the L2-orthonormal tangential basis,
    // hence the 1/L factor on the raw Fourier coefficients.
    const double s = model.scale_for(u) / model.grid.box_length;
    SpectralField f(model.grid);
    for (int mi = 0; mi < model.n_retained(); ++mi) {
        const NoiseMode& mode = model.modes[mi];
        const Complex v = s * dW[mi];
        f.u1[mode.lattice_index] = v * mode.dir1;
        f.u2[mode.lattice_index] = v * mode.dir2;
    }
    return f;
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "path I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw io_error("path dump: truncated file");
    return v;
}

}  // namespace

void write_path(const std::string& file, const WienerPath& path) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw io_error("path dump: cannot open " + file + " for writing");
    os.write("SNSW", 4);
    put<std::uint64_t>(os, path.seed);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(path.n_fine));
    put<double>(os, path.dt_fine);
    for (const auto& c : path.increments) {
        put<double>(os, c.real());
        put<double>(os, c.imag());
    }
    if (!os) throw io_error("path dump: write failed for " + file);
}

WienerPath read_path(const std::string& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw io_error("path dump: cannot open " + file);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "SNSW", 4) != 0) throw io_error("path dump: bad magic");
    WienerPath p;
    p.seed = get<std::uint64_t>(is);
    p.n_fine = static_cast<int>(get<std::uint32_t>(is));
    p.dt_fine = get<double>(is);
    const auto start = is.tellg();
    is.seekg(0, std::ios::end);
    const auto bytes = is.tellg() - start;
    is.seekg(start);
    if (p.n_fine <= 0 || bytes % (16 * p.n_fine) != 0) throw io_error("path dump: bad payload size");
    p.n_modes = static_cast<int>(bytes / (16 * p.n_fine));
    p.increments.resize(static_cast<size_t>(p.n_fine) * p.n_modes);
    for (auto& c : p.increments) {
        const double re = get<double>(is);
        const double im = get<double>(is);
        c = {re, im};
    }
    return p;
}

}  // namespace sns
