#pragma once

#include <cstddef>
#include <string_view>

#include "spreadspec/operators.hpp"
#include "spreadspec/types.hpp"

namespace spreadspec {

enum class ModulationKind { none, rademacher, steinhaus, chirp };

std::string_view to_string(ModulationKind kind);
ModulationKind parse_modulation_kind(std::string_view name);

/// A unit-modulus pre-modulation sequence with its grid metadata.
///
/// For the chirp, the analog rate w and field of view L only enter through
/// the discrete rate chirp_rate = w L^2 / N, so neither is stored.
struct ModulationSpec {
  ModulationKind kind = ModulationKind::none;
  std::size_t n_signal = 0;
  std::size_t n_upsampled = 0;
  double chirp_rate = 0.0;
  Seed seed = 0;
  CVec values;
};

ModulationSpec make_no_modulation(std::size_t n);

/// i.i.d. Rademacher (+-1) or Steinhaus (uniform phase) sequence of length n.
ModulationSpec make_random_modulation(ModulationKind kind, std::size_t n, Seed seed);

/// Smallest even integer >= (1 + w_bar) n.
std::size_t upsampled_size(double w_bar, std::size_t n);

/// Linear chirp sampled on the centered up-sampled grid:
///   c_k = exp(i pi w_bar n (k / N_w - 1/2)^2),  k = 0 .. N_w - 1.
/// Requires n even and >= 2, w_bar >= 0.
ModulationSpec make_chirp_modulation(double w_bar, std::size_t n);

/// Diagonal operator of size n_upsampled.
LinearOperator modulation_operator(const ModulationSpec &spec);

/// Band-limited up-sampling by zero padding in the unitary Fourier domain.
/// The n centered bins (-n/2 .. n/2-1) are copied into the n_up-bin
/// spectrum; the result is an isometry (U* U = I). Both sizes must be even
/// and n_up >= n.
LinearOperator make_upsampler(std::size_t n, std::size_t n_up);

}  // namespace spreadspec
