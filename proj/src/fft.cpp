#include "sns/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace sns {
namespace {

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

struct PlanCache {
    std::map<int, PlanPair> plans;
    ~PlanCache() {
        for (auto& [n, p] : plans) {
            fftw_destroy_plan(p.forward);
            fftw_destroy_plan(p.backward);
        }
    }
};

// FFTW plan creation is not thread-safe; new-array execution is.
std::mutex plan_mutex;

PlanPair& plans_for(int n) {
    static PlanCache cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.plans.find(n);
    if (it != cache.plans.end()) return it->second;
    PlanPair p;
    fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n) * n);
    p.forward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    p.backward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    return cache.plans.emplace(n, p).first->second;
}

}  // namespace

std::vector<std::complex<double>>& fft_scratch(int n, int which) {
    thread_local std::map<std::pair<int, int>, std::vector<std::complex<double>>> scratch;
    auto& v = scratch[{n, which}];
    v.resize(static_cast<size_t>(n) * n);
    return v;
}

void spectral_to_physical(int n, const std::complex<double>* coeffs, std::complex<double>* phys) {
    auto& p = plans_for(n);
    auto& tmp = fft_scratch(n, 7);
    std::copy(coeffs, coeffs + static_cast<size_t>(n) * n, tmp.data());
    fftw_execute_dft(p.backward, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(phys));
}

void physical_to_spectral(int n, const std::complex<double>* phys, std::complex<double>* coeffs) {
    auto& p = plans_for(n);
    auto& tmp = fft_scratch(n, 8);
    std::copy(phys, phys + static_cast<size_t>(n) * n, tmp.data());
    fftw_execute_dft(p.forward, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(coeffs));
    const double scale = 1.0 / (static_cast<double>(n) * n);
    for (size_t i = 0; i < static_cast<size_t>(n) * n; ++i) coeffs[i] *= scale;
}

}  // namespace sns
