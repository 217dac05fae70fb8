#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pulsekit {

/// One-sided spectrum (n/2 + 1 bins) of `x` zero-padded to length `n`.
std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n);

/// Unnormalised forward / inverse complex transforms (inverse divides by n).
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x);
std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> x);

std::size_t next_pow2(std::size_t n) noexcept;

}  // namespace pulsekit
