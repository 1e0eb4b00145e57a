#include "spreadspec/modulation.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spreadspec/fft.hpp"
#include "spreadspec/rng.hpp"

namespace spreadspec {

std::string_view to_string(ModulationKind kind) {
  switch (kind) {
    case ModulationKind::none: return "none";
    case ModulationKind::rademacher: return "rademacher";
    case ModulationKind::steinhaus: return "steinhaus";
    case ModulationKind::chirp: return "chirp";
  }
  return "unknown";
}

ModulationKind parse_modulation_kind(std::string_view name) {
  if (name == "none") return ModulationKind::none;
  if (name == "rademacher") return ModulationKind::rademacher;
  if (name == "steinhaus") return ModulationKind::steinhaus;
  if (name == "chirp") return ModulationKind::chirp;
  throw std::invalid_argument("unknown modulation kind '" + std::string(name) + "'");
}

ModulationSpec make_no_modulation(std::size_t n) {
  if (n == 0) throw std::invalid_argument("modulation length must be positive");
  return {ModulationKind::none, n, n, 0.0, 0, CVec::Ones(n)};
}

ModulationSpec make_random_modulation(ModulationKind kind, std::size_t n, Seed seed) {
  if (n == 0) throw std::invalid_argument("modulation length must be positive");
  if (kind != ModulationKind::rademacher && kind != ModulationKind::steinhaus)
    throw std::invalid_argument("make_random_modulation: kind must be rademacher or steinhaus");
  ModulationSpec spec{kind, n, n, 0.0, seed, CVec(n)};
  Rng rng(seed);
  for (std::size_t k = 0; k < n; ++k) {
    if (kind == ModulationKind::rademacher)
      spec.values[k] = (rng.uniform() < 0.5) ? 1.0 : -1.0;
    else
      spec.values[k] = rng.unit_phase();
  }
  return spec;
}

std::size_t upsampled_size(double w_bar, std::size_t n) {
  // The small slack keeps exact products such as 1.25 * 8 from rounding up.
  const double target = (1.0 + std::abs(w_bar)) * static_cast<double>(n);
  auto nw = static_cast<std::size_t>(std::ceil(target - 1e-9));
  if (nw < n) nw = n;
  if (nw % 2 != 0) ++nw;
  return nw;
}

ModulationSpec make_chirp_modulation(double w_bar, std::size_t n) {
  if (!(w_bar >= 0.0)) throw std::invalid_argument("chirp rate must be non-negative");
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("chirp requires an even size n >= 2");
  const std::size_t nw = upsampled_size(w_bar, n);
  ModulationSpec spec{ModulationKind::chirp, n, nw, w_bar, 0, CVec(nw)};
  const double rate = std::numbers::pi * w_bar * static_cast<double>(n);
  for (std::size_t k = 0; k < nw; ++k) {
    const double tau = static_cast<double>(k) / static_cast<double>(nw) - 0.5;
    spec.values[k] = std::polar(1.0, rate * tau * tau);
  }
  return spec;
}

LinearOperator modulation_operator(const ModulationSpec &spec) {
  if (static_cast<std::size_t>(spec.values.size()) != spec.n_upsampled)
    throw std::invalid_argument("modulation spec: values do not match n_upsampled");
  return make_diagonal(spec.values, std::string(to_string(spec.kind)) + "_mod");
}

LinearOperator make_upsampler(std::size_t n, std::size_t n_up) {
  if (n == 0 || n % 2 != 0 || n_up % 2 != 0)
    throw std::invalid_argument("make_upsampler: sizes must be even and positive");
  if (n_up < n) throw std::invalid_argument("make_upsampler: n_up must be >= n");
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  const auto sn = static_cast<std::ptrdiff_t>(n);
  const auto sup = static_cast<std::ptrdiff_t>(n_up);
  auto wrap = [](std::ptrdiff_t f, std::ptrdiff_t size) { return ((f % size) + size) % size; };

  auto forward = [=](const CVec &x) {
    const CVec spectrum = fft::dft(x);
    CVec padded = CVec::Zero(sup);
    for (std::ptrdiff_t f = -half; f < half; ++f) padded[wrap(f, sup)] = spectrum[wrap(f, sn)];
    return fft::idft(padded);
  };
  auto adjoint = [=](const CVec &y) {
    const CVec spectrum = fft::dft(y);
    CVec band(sn);
    for (std::ptrdiff_t f = -half; f < half; ++f) band[wrap(f, sn)] = spectrum[wrap(f, sup)];
    return fft::idft(band);
  };
  LinearOperator::Structure s{true, n == n_up};
  return {n, n_up, forward, adjoint, "U" + std::to_string(n) + "->" + std::to_string(n_up), s};
}

}  // namespace spreadspec
