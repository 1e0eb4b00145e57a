#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace spreadspec {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using Seed = std::uint64_t;

/// Thrown for requests exceeding a dense-path size cap.
class UnsupportedSize : public std::runtime_error {
 public:
  explicit UnsupportedSize(const std::string &what) : std::runtime_error(what) {}
};

}  // namespace spreadspec
