#pragma once

#include "spreadspec/types.hpp"

namespace spreadspec::fft {

// Unitary DFT pair of arbitrary length, backed by FFTW.
//   dft:  X_k = n^{-1/2} sum_j x_j exp(-2 pi i jk/n)
//   idft: x_j = n^{-1/2} sum_k X_k exp(+2 pi i jk/n)
// Safe to call concurrently; plans are created once per (n, direction).
CVec dft(const CVec &x);
CVec idft(const CVec &x);

}  // namespace spreadspec::fft
