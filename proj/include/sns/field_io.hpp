#pragma once

#include <stdexcept>
#include <string>

#include "sns/spectral_field.hpp"

namespace sns {

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Snapshot layout: "SNS2", u32 n_modes, f64 box_length, then per lattice
/// point (row-major) little-endian f64 (re1, im1, re2, im2). Round trips
/// bit-exactly.
void write_snapshot(const std::string& path, const SpectralField& f);
SpectralField read_snapshot(const std::string& path);

}  // namespace sns
