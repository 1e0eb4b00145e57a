#include "spreadspec/solver.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace spreadspec {

Complex complex_soft_threshold(Complex z, double t) {
  if (t < 0.0) throw std::invalid_argument("soft threshold must be non-negative");
  const double mag = std::abs(z);
  if (mag <= t) return {0.0, 0.0};
  return (1.0 - t / mag) * z;
}

CVec soft_threshold(const CVec &z, double t) {
  CVec out(z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) out[k] = complex_soft_threshold(z[k], t);
  return out;
}

struct ConstraintProjector::Impl {
  LinearOperator a;
  CVec y;
  double eta;
  SolverOptions opts;
  Strategy strategy;

  // dense_gram: A A* = Q diag(lambda) Q*
  CMat q;
  RVec lambda;
  Eigen::Array<bool, Eigen::Dynamic, 1> null_mode;

  // iterative: last Lagrange multiplier, reused as the next starting guess
  mutable double last_mu = 1.0;

  Impl(const LinearOperator &op, CVec rhs, double radius, const SolverOptions &o)
      : a(op), y(std::move(rhs)), eta(radius), opts(o) {
    const auto m = a.out_dim();
    if (a.structure().orthonormal_rows) {
      strategy = Strategy::orthonormal_rows;
    } else if (m <= opts.dense_gram_limit) {
      strategy = Strategy::dense_gram;
      build_gram();
    } else {
      strategy = Strategy::iterative;
    }
  }

  void build_gram() {
    const auto m = static_cast<Eigen::Index>(a.out_dim());
    CMat g(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      CVec e = CVec::Zero(m);
      e[j] = 1.0;
      g.col(j) = a.forward(a.adjoint(e));
    }
    const CMat herm = 0.5 * (g + g.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> eig(herm);
    q = eig.eigenvectors();
    lambda = eig.eigenvalues();
    const double cutoff =
        std::max(lambda.cwiseAbs().maxCoeff(), 1.0) * static_cast<double>(m) * 1e-12;
    null_mode = lambda.array() <= cutoff;
  }

  CVec apply_gram_shifted(const CVec &v, double mu) const {
    return a.forward(a.adjoint(v)) + mu * v;
  }

  // Conjugate gradients for (mu I + A A*) z = r from a zero start. For
  // mu = 0 and rank-deficient A A*, the iterates stay in the range and
  // converge to the minimum-norm solution of a consistent system.
  CVec cg(const CVec &r, double mu) const {
    CVec z = CVec::Zero(r.size());
    CVec res = r;
    CVec p = res;
    double rr = res.squaredNorm();
    const double stop = opts.cg_tol * opts.cg_tol * std::max(rr, 1e-300);
    for (int it = 0; it < opts.cg_max_iterations && rr > stop; ++it) {
      const CVec ap = apply_gram_shifted(p, mu);
      const double pap = p.dot(ap).real();
      if (!(pap > 0.0)) break;
      const double step = rr / pap;
      z += step * p;
      res -= step * ap;
      const double rr_next = res.squaredNorm();
      p = res + (rr_next / rr) * p;
      rr = rr_next;
    }
    return z;
  }

  CVec project_dense(const CVec &alpha, const CVec &r) const {
    const CVec rh = q.adjoint() * r;
    const Eigen::Index m = rh.size();
    double null_sq = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      if (null_mode[i]) null_sq += std::norm(rh[i]);

    double mu = 0.0;
    if (eta > 0.0 && null_sq < eta * eta) {
      auto excess = [&](double t) {
        double acc = null_sq;
        for (Eigen::Index i = 0; i < m; ++i)
          if (!null_mode[i]) acc += std::norm(t * rh[i] / (t + lambda[i]));
        return acc - eta * eta;
      };
      double lo = 0.0;
      double hi = std::max(1.0, lambda.maxCoeff());
      while (excess(hi) < 0.0 && hi < 1e300) hi *= 4.0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < 0.0 ? lo : hi) = mid;
      }
      mu = 0.5 * (lo + hi);
    }
    CVec zh(m);
    for (Eigen::Index i = 0; i < m; ++i)
      zh[i] = null_mode[i] ? Complex{0.0, 0.0} : rh[i] / (mu + lambda[i]);
    return alpha + a.adjoint(q * zh);
  }

  CVec project_iterative(const CVec &alpha, const CVec &r) const {
    if (eta == 0.0) return alpha + a.adjoint(cg(r, 0.0));
    // ||y - A alpha'|| = mu ||z(mu)|| increases with mu; bracket in log mu.
    auto residual = [&](double mu, CVec &z) {
      z = cg(r, mu);
      return mu * z.norm();
    };
    CVec z;
    double lo = last_mu, hi = last_mu;
    if (residual(last_mu, z) > eta) {
      do {
        hi = lo;
        lo /= 4.0;
      } while (residual(lo, z) > eta && lo > 1e-300);
    } else {
      do {
        lo = hi;
        hi *= 4.0;
      } while (residual(hi, z) < eta && hi < 1e300);
    }
    for (int it = 0; it < 60 && hi / lo > 1.0 + 1e-10; ++it) {
      const double mid = std::sqrt(lo * hi);
      (residual(mid, z) > eta ? hi : lo) = mid;
    }
    last_mu = std::sqrt(lo * hi);
    z = cg(r, last_mu);
    return alpha + a.adjoint(z);
  }

  CVec project(const CVec &alpha) const {
    const CVec r = y - a.forward(alpha);
    const double rn = r.norm();
    if (rn <= eta) return alpha;
    switch (strategy) {
      case Strategy::orthonormal_rows: {
        const double keep = eta > 0.0 ? eta / rn : 0.0;
        return alpha + a.adjoint((1.0 - keep) * r);
      }
      case Strategy::dense_gram: return project_dense(alpha, r);
      case Strategy::iterative: return project_iterative(alpha, r);
    }
    return alpha;
  }
};

ConstraintProjector::ConstraintProjector(const LinearOperator &a, CVec y, double eta,
                                         const SolverOptions &opts) {
  if (static_cast<std::size_t>(y.size()) != a.out_dim())
    throw std::invalid_argument("measurement vector has size " + std::to_string(y.size()) +
                                ", operator produces " + std::to_string(a.out_dim()));
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be non-negative");
  impl_ = std::make_unique<Impl>(a, std::move(y), eta, opts);
}

ConstraintProjector::~ConstraintProjector() = default;
ConstraintProjector::ConstraintProjector(ConstraintProjector &&) noexcept = default;
ConstraintProjector &ConstraintProjector::operator=(ConstraintProjector &&) noexcept = default;

CVec ConstraintProjector::project(const CVec &alpha) const { return impl_->project(alpha); }

ConstraintProjector::Strategy ConstraintProjector::strategy() const { return impl_->strategy; }

namespace {

void check_options(const SolverOptions &opts) {
  if (opts.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(opts.convergence_tol > 0.0) || !(opts.feasibility_tol > 0.0))
    throw std::invalid_argument("solver tolerances must be positive");
  if (!(opts.step_parameter > 0.0)) throw std::invalid_argument("step_parameter must be positive");
}

}  // namespace

SolverResult solve_bpdn(const LinearOperator &a, const CVec &y, double eta,
                        const SolverOptions &opts) {
  check_options(opts);
  const ConstraintProjector projector(a, y, eta, opts);

  SolverResult result;
  const double scale = a.adjoint(y).cwiseAbs().maxCoeff();
  if (scale == 0.0 || y.norm() <= eta) {
    // Zero is feasible, hence optimal.
    result.alpha_star = CVec::Zero(a.in_dim());
    result.residual_norm = y.norm();
    result.converged = true;
    return result;
  }
  const double gamma = opts.step_parameter * scale;

  CVec z = CVec::Zero(a.in_dim());
  CVec x = projector.project(z);
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const CVec v = soft_threshold(2.0 * x - z, gamma);
    z += v - x;
    const CVec x_next = projector.project(z);
    const double change = (x_next - x).norm();
    const double ref = std::max(x_next.norm(), std::numeric_limits<double>::min());
    const double gap = (v - x).norm();
    x = x_next;
    result.iterations = it;
    if (change <= opts.convergence_tol * ref && gap <= std::sqrt(opts.convergence_tol) * ref) {
      result.converged = true;
      break;
    }
  }

  result.alpha_star = x;
  result.residual_norm = (y - a.forward(x)).norm();
  result.objective = x.cwiseAbs().sum();
  if (result.residual_norm > eta + opts.feasibility_tol) result.converged = false;
  return result;
}

}  // namespace spreadspec
