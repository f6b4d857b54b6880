#pragma once

#include <complex>
#include <span>

namespace locop {

/// Unnormalized in-place DFT: out_k = sum_j in_j exp(sign * 2 pi i j k / n).
/// Backed by FFTW with cached estimate-mode plans; thread safe.
void dft_inplace(std::span<std::complex<double>> data, int sign);

/// Same transform on each consecutive length-n line of data.
void dft_batch(std::span<std::complex<double>> data, std::size_t n, int sign);

/// howmany transforms of length n; sequence m reads data[m dist + j stride].
void dft_strided(std::complex<double>* data, std::size_t n, std::size_t stride, std::size_t howmany,
                 std::size_t dist, int sign);

}  // namespace locop
