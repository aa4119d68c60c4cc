#pragma once

#include <complex>
#include <vector>

namespace sns {

/// Unnormalized inverse DFT: coefficients -> values on the n x n grid.
void spectral_to_physical(int n, const std::complex<double>* coeffs, std::complex<double>* phys);

/// Forward DFT scaled by 1/n^2: grid values -> coefficients.
void physical_to_spectral(int n, const std::complex<double>* phys, std::complex<double>* coeffs);

/// Per-thread scratch array of n*n complex values, reused across calls.
std::vector<std::complex<double>>& fft_scratch(int n, int which);

}  // namespace sns
