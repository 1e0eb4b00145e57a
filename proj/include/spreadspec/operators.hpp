#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "spreadspec/types.hpp"

namespace spreadspec {

/// Orthonormal bases available as sensing or sparsity bases.
enum class TransformKind { fourier, hadamard, haar, dirac };

std::string_view to_string(TransformKind kind);
/// Throws std::invalid_argument on unknown names.
TransformKind parse_transform_kind(std::string_view name);

/// All entries of equal magnitude (fourier, hadamard).
bool is_universal(TransformKind kind);

/// What is known about an operator by construction.
struct OperatorStructure {
  bool isometry = false;
  bool orthonormal_rows = false;
};

/// Matrix-free linear map C^in_dim -> C^out_dim with its adjoint.
///
/// Instances are immutable and may be shared between threads; forward and
/// adjoint allocate fresh outputs. The two structural flags record what is
/// known by construction and let the solver pick closed-form projections:
///   isometry         A* A = I
///   orthonormal_rows A A* = I
class LinearOperator {
 public:
  using Apply = std::function<CVec(const CVec &)>;

  using Structure = OperatorStructure;

  LinearOperator(std::size_t in_dim, std::size_t out_dim, Apply forward, Apply adjoint,
                 std::string label, Structure structure = {});

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  const std::string &label() const { return label_; }
  Structure structure() const { return structure_; }
  bool is_unitary() const { return structure_.isometry && structure_.orthonormal_rows; }

  /// Throws std::invalid_argument if x.size() != in_dim().
  CVec forward(const CVec &x) const;
  /// Throws std::invalid_argument if y.size() != out_dim().
  CVec adjoint(const CVec &y) const;

 private:
  std::size_t in_dim_;
  std::size_t out_dim_;
  Apply forward_;
  Apply adjoint_;
  std::string label_;
  Structure structure_;
};

/// Law used to draw measurement indices.
enum class IndexLaw { iid_uniform, uniform_without_replacement };

std::string_view to_string(IndexLaw law);
IndexLaw parse_index_law(std::string_view name);

/// Selected measurement rows. Indices are 0-based, in draw order.
struct IndexSet {
  std::vector<std::size_t> indices;
  IndexLaw law = IndexLaw::iid_uniform;
  Seed seed = 0;

  std::size_t size() const { return indices.size(); }
  bool has_duplicates() const;
};

/// Draws m indices from [0, n_total). Deterministic in (law, seed, m, n_total).
/// Without-replacement requires m <= n_total.
IndexSet sample_indices(IndexLaw law, std::size_t m, std::size_t n_total, Seed seed);

/// Unitary transform of size n. forward is synthesis (coefficients to signal,
/// the basis-matrix product), adjoint is analysis.
///
///   fourier   inverse unitary DFT (columns are Fourier atoms)
///   hadamard  Sylvester-ordered Walsh-Hadamard, scaled by n^{-1/2}
///   haar      full-depth periodic orthonormal Haar; coefficient layout is
///             [scaling, coarsest detail, ..., finest details]
///   dirac     identity
///
/// hadamard and haar require n to be a power of two.
LinearOperator make_transform(TransformKind kind, std::size_t n);

LinearOperator make_identity(std::size_t n);

/// Keeps the rows listed in omega (duplicates repeated); the adjoint
/// scatter-adds back into the full output space before applying op.adjoint.
LinearOperator restrict_rows(const LinearOperator &op, const IndexSet &omega);

/// outer ∘ inner.
LinearOperator compose(const LinearOperator &outer, const LinearOperator &inner);

/// Swaps forward and adjoint.
LinearOperator adjoint_of(const LinearOperator &op);

/// Entrywise multiplication by d; the adjoint multiplies by conj(d).
/// Flagged unitary when every |d_k| = 1 (within 1e-12).
LinearOperator make_diagonal(const CVec &d, std::string label = "diag");

/// Dense operator from an explicit matrix (tests and small problems).
LinearOperator make_dense(const CMat &matrix, std::string label = "dense");

/// Materializes op column by column. Only intended for small sizes.
CMat to_dense(const LinearOperator &op);

/// Haar kernels on raw vectors (exposed for tests and benchmarks).
namespace haar {
CVec analysis(const CVec &x);
CVec synthesis(const CVec &c);
}  // namespace haar

/// In-place unnormalized fast Walsh-Hadamard transform.
void fwht_inplace(CVec &x);

bool is_power_of_two(std::size_t n);

}  // namespace spreadspec
