#include "spreadspec/operators.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <unordered_set>
#include <utility>

#include "spreadspec/fft.hpp"
#include "spreadspec/rng.hpp"

namespace spreadspec {

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::fourier: return "fourier";
    case TransformKind::hadamard: return "hadamard";
    case TransformKind::haar: return "haar";
    case TransformKind::dirac: return "dirac";
  }
  return "unknown";
}

TransformKind parse_transform_kind(std::string_view name) {
  if (name == "fourier") return TransformKind::fourier;
  if (name == "hadamard") return TransformKind::hadamard;
  if (name == "haar") return TransformKind::haar;
  if (name == "dirac") return TransformKind::dirac;
  throw std::invalid_argument("unknown transform kind '" + std::string(name) + "'");
}

bool is_universal(TransformKind kind) {
  return kind == TransformKind::fourier || kind == TransformKind::hadamard;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

LinearOperator::LinearOperator(std::size_t in_dim, std::size_t out_dim, Apply forward,
                               Apply adjoint, std::string label, Structure structure)
    : in_dim_(in_dim),
      out_dim_(out_dim),
      forward_(std::move(forward)),
      adjoint_(std::move(adjoint)),
      label_(std::move(label)),
      structure_(structure) {
  if (in_dim_ == 0 || out_dim_ == 0)
    throw std::invalid_argument("operator dimensions must be positive");
}

CVec LinearOperator::forward(const CVec &x) const {
  if (static_cast<std::size_t>(x.size()) != in_dim_)
    throw std::invalid_argument(label_ + ": forward input has size " + std::to_string(x.size()) +
                                ", expected " + std::to_string(in_dim_));
  return forward_(x);
}

CVec LinearOperator::adjoint(const CVec &y) const {
  if (static_cast<std::size_t>(y.size()) != out_dim_)
    throw std::invalid_argument(label_ + ": adjoint input has size " + std::to_string(y.size()) +
                                ", expected " + std::to_string(out_dim_));
  return adjoint_(y);
}

std::string_view to_string(IndexLaw law) {
  switch (law) {
    case IndexLaw::iid_uniform: return "iid_uniform";
    case IndexLaw::uniform_without_replacement: return "uniform_without_replacement";
  }
  return "unknown";
}

IndexLaw parse_index_law(std::string_view name) {
  if (name == "iid_uniform") return IndexLaw::iid_uniform;
  if (name == "uniform_without_replacement" || name == "without_replacement")
    return IndexLaw::uniform_without_replacement;
  throw std::invalid_argument("unknown index law '" + std::string(name) + "'");
}

bool IndexSet::has_duplicates() const {
  std::unordered_set<std::size_t> seen;
  for (auto i : indices)
    if (!seen.insert(i).second) return true;
  return false;
}

IndexSet sample_indices(IndexLaw law, std::size_t m, std::size_t n_total, Seed seed) {
  if (n_total == 0) throw std::invalid_argument("sample_indices: empty index range");
  IndexSet set{{}, law, seed};
  set.indices.reserve(m);
  Rng rng(seed);
  if (law == IndexLaw::iid_uniform) {
    for (std::size_t k = 0; k < m; ++k) set.indices.push_back(rng.below(n_total));
    return set;
  }
  if (m > n_total)
    throw std::invalid_argument("sample_indices: m = " + std::to_string(m) +
                                " exceeds range " + std::to_string(n_total) +
                                " without replacement");
  // Partial Fisher-Yates.
  std::vector<std::size_t> pool(n_total);
  for (std::size_t i = 0; i < n_total; ++i) pool[i] = i;
  for (std::size_t k = 0; k < m; ++k) {
    const auto j = k + rng.below(n_total - k);
    std::swap(pool[k], pool[j]);
    set.indices.push_back(pool[k]);
  }
  return set;
}

void fwht_inplace(CVec &x) {
  const auto n = x.size();
  for (Eigen::Index h = 1; h < n; h *= 2) {
    for (Eigen::Index i = 0; i < n; i += 2 * h) {
      for (Eigen::Index j = i; j < i + h; ++j) {
        const Complex a = x[j];
        const Complex b = x[j + h];
        x[j] = a + b;
        x[j + h] = a - b;
      }
    }
  }
}

namespace haar {

CVec analysis(const CVec &x) {
  CVec out = x;
  CVec tmp(x.size());
  const double r = std::numbers::sqrt2 / 2.0;
  for (Eigen::Index len = x.size(); len > 1; len /= 2) {
    const Eigen::Index half = len / 2;
    for (Eigen::Index k = 0; k < half; ++k) {
      tmp[k] = r * (out[2 * k] + out[2 * k + 1]);
      tmp[half + k] = r * (out[2 * k] - out[2 * k + 1]);
    }
    out.head(len) = tmp.head(len);
  }
  return out;
}

CVec synthesis(const CVec &c) {
  CVec out = c;
  CVec tmp(c.size());
  const double r = std::numbers::sqrt2 / 2.0;
  for (Eigen::Index len = 2; len <= c.size(); len *= 2) {
    const Eigen::Index half = len / 2;
    for (Eigen::Index k = 0; k < half; ++k) {
      tmp[2 * k] = r * (out[k] + out[half + k]);
      tmp[2 * k + 1] = r * (out[k] - out[half + k]);
    }
    out.head(len) = tmp.head(len);
  }
  return out;
}

}  // namespace haar

namespace {

constexpr LinearOperator::Structure kUnitary{true, true};

LinearOperator make_hadamard(std::size_t n) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  auto apply = [scale](const CVec &x) {
    CVec y = x;
    fwht_inplace(y);
    y *= scale;
    return y;
  };
  return {n, n, apply, apply, "hadamard" + std::to_string(n), kUnitary};
}

}  // namespace

LinearOperator make_identity(std::size_t n) {
  auto id = [](const CVec &x) { return x; };
  return {n, n, id, id, "identity" + std::to_string(n), kUnitary};
}

LinearOperator make_transform(TransformKind kind, std::size_t n) {
  if (n == 0) throw std::invalid_argument("make_transform: n must be positive");
  if ((kind == TransformKind::hadamard || kind == TransformKind::haar) && !is_power_of_two(n))
    throw std::invalid_argument("make_transform: " + std::string(to_string(kind)) +
                                " requires a power-of-two size, got " + std::to_string(n));
  switch (kind) {
    case TransformKind::fourier:
      return {n, n, fft::idft, fft::dft, "fourier" + std::to_string(n), kUnitary};
    case TransformKind::hadamard: return make_hadamard(n);
    case TransformKind::haar:
      return {n, n, haar::synthesis, haar::analysis, "haar" + std::to_string(n), kUnitary};
    case TransformKind::dirac: {
      auto id = [](const CVec &x) { return x; };
      return {n, n, id, id, "dirac" + std::to_string(n), kUnitary};
    }
  }
  throw std::invalid_argument("make_transform: unknown kind");
}

LinearOperator restrict_rows(const LinearOperator &op, const IndexSet &omega) {
  if (omega.indices.empty()) throw std::invalid_argument("restrict_rows: empty index set");
  const auto full = op.out_dim();
  for (auto i : omega.indices)
    if (i >= full)
      throw std::invalid_argument("restrict_rows: index " + std::to_string(i) +
                                  " out of range [0, " + std::to_string(full) + ")");
  auto rows = std::make_shared<const std::vector<std::size_t>>(omega.indices);
  auto forward = [op, rows](const CVec &x) {
    const CVec full_y = op.forward(x);
    CVec y(rows->size());
    for (std::size_t k = 0; k < rows->size(); ++k) y[k] = full_y[(*rows)[k]];
    return y;
  };
  auto adjoint = [op, rows, full](const CVec &y) {
    CVec scattered = CVec::Zero(full);
    for (std::size_t k = 0; k < rows->size(); ++k) scattered[(*rows)[k]] += y[k];
    return op.adjoint(scattered);
  };
  LinearOperator::Structure s;
  s.orthonormal_rows = op.structure().orthonormal_rows && !omega.has_duplicates();
  return {op.in_dim(), rows->size(), forward, adjoint,
          "R[" + std::to_string(rows->size()) + "]" + op.label(), s};
}

LinearOperator compose(const LinearOperator &outer, const LinearOperator &inner) {
  if (inner.out_dim() != outer.in_dim())
    throw std::invalid_argument("compose: " + inner.label() + " produces " +
                                std::to_string(inner.out_dim()) + " entries but " +
                                outer.label() + " expects " + std::to_string(outer.in_dim()));
  auto forward = [outer, inner](const CVec &x) { return outer.forward(inner.forward(x)); };
  auto adjoint = [outer, inner](const CVec &y) { return inner.adjoint(outer.adjoint(y)); };
  LinearOperator::Structure s;
  s.isometry = outer.structure().isometry && inner.structure().isometry;
  s.orthonormal_rows = outer.structure().orthonormal_rows && inner.structure().orthonormal_rows;
  return {inner.in_dim(), outer.out_dim(), forward, adjoint, outer.label() + "*" + inner.label(),
          s};
}

LinearOperator adjoint_of(const LinearOperator &op) {
  auto forward = [op](const CVec &x) { return op.adjoint(x); };
  auto adjoint = [op](const CVec &y) { return op.forward(y); };
  LinearOperator::Structure s{op.structure().orthonormal_rows, op.structure().isometry};
  return {op.out_dim(), op.in_dim(), forward, adjoint, op.label() + "^H", s};
}

LinearOperator make_diagonal(const CVec &d, std::string label) {
  auto diag = std::make_shared<const CVec>(d);
  auto forward = [diag](const CVec &x) -> CVec { return diag->cwiseProduct(x); };
  auto adjoint = [diag](const CVec &y) -> CVec { return diag->conjugate().cwiseProduct(y); };
  const bool unit = ((d.cwiseAbs().array() - 1.0).abs() <= 1e-12).all();
  LinearOperator::Structure s{unit, unit};
  return {static_cast<std::size_t>(d.size()), static_cast<std::size_t>(d.size()), forward,
          adjoint, std::move(label), s};
}

LinearOperator make_dense(const CMat &matrix, std::string label) {
  auto m = std::make_shared<const CMat>(matrix);
  auto forward = [m](const CVec &x) -> CVec { return (*m) * x; };
  auto adjoint = [m](const CVec &y) -> CVec { return m->adjoint() * y; };
  return {static_cast<std::size_t>(matrix.cols()), static_cast<std::size_t>(matrix.rows()),
          forward, adjoint, std::move(label)};
}

CMat to_dense(const LinearOperator &op) {
  CMat out(op.out_dim(), op.in_dim());
  for (std::size_t j = 0; j < op.in_dim(); ++j) {
    CVec e = CVec::Zero(op.in_dim());
    e[j] = 1.0;
    out.col(j) = op.forward(e);
  }
  return out;
}

}  // namespace spreadspec
