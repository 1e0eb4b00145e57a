#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "spreadspec/types.hpp"

namespace spreadspec {

/// Mix a base seed with a list of integer keys into a new 64-bit seed.
/// Used to derive per-cell and per-trial streams so results do not depend
/// on the order in which work items are executed.
Seed derive_seed(Seed base, std::initializer_list<std::uint64_t> keys);

/// Seeded generator whose draws are bit-identical across platforms.
/// std distributions are implementation-defined, so the conversions from
/// raw 64-bit words are done here.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform integer on [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via Box-Muller.
  double normal();
  /// Uniform phase e^{i theta}, theta ~ U[0, 2 pi).
  Complex unit_phase();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spreadspec
