#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "kufs/spectral.hpp"
#include "kufs/types.hpp"

namespace kufs {

enum class AdmmVariant { kBilinear, kQuadratic };

inline std::string to_string(AdmmVariant v) {
  return v == AdmmVariant::kBilinear ? "bilinear" : "quadratic";
}

struct AdmmConfig {
  double mu0 = 0.1;
  double rho = 1.05;
  double mu_max = 1e7;
  Index max_iterations = 3000;
  Index stability_window = 30;
  AdmmVariant variant = AdmmVariant::kBilinear;
};

template <typename Scalar>
struct AdmmState {
  Matrix<Scalar> v, u, w;
  Matrix<Scalar> omega, gamma;  // multipliers for V=U and V=W
  Scalar mu = 0;
  Index iteration = 0;
  Index stable_count = 0;
  IndexList last_selection;

  Index p() const { return v.rows(); }
  Index h() const { return v.cols(); }
};

template <typename Scalar>
struct TraceRecord {
  Index iteration = 0;
  Scalar objective = 0;   // -Tr(V^T A V) at this iterate
  Scalar v_norm = 0;      // ||V||_F
  Scalar residual_u = 0;  // ||V - U||_F
  Scalar residual_w = 0;  // ||V - W||_F
  Scalar mu = 0;          // penalty used during this iteration
  bool selection_changed = false;
  bool degenerate_u = false;  // rank-deficient Procrustes step
  bool degenerate_w = false;  // fewer than h nonzero rows available
};

template <typename Scalar>
struct ConvergenceTrace {
  std::vector<TraceRecord<Scalar>> records;
};

/// argmax Tr(M^T V) over ||V||_F^2 = h: scale M onto the radius-sqrt(h)
/// Frobenius sphere.
template <typename Derived>
Matrix<typename Derived::Scalar> sphere_step(const Eigen::MatrixBase<Derived>& m, Index h) {
  using Scalar = typename Derived::Scalar;
  const Scalar norm = m.norm();
  if (!(norm > Scalar(0))) {
    throw SolverError("sphere_step: degenerate direction, ||M||_F = 0");
  }
  return (std::sqrt(static_cast<Scalar>(h)) / norm) * m.derived();
}

/// Orthogonal Procrustes solution: argmax Tr(H^T U) over U^T U = I is the
/// polar factor P Q^T from the thin SVD H = P Sigma Q^T. `rank_deficient`
/// reports a zero singular value, where the maximizer is not unique and the
/// SVD's deterministic output is kept.
template <typename Derived>
Matrix<typename Derived::Scalar> polar_factor(const Eigen::MatrixBase<Derived>& h,
                                              bool* rank_deficient = nullptr) {
  using Scalar = typename Derived::Scalar;
  Eigen::JacobiSVD<Matrix<Scalar>> svd(h.derived(),
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (rank_deficient != nullptr) {
    const auto& sv = svd.singularValues();
    const Scalar tol = static_cast<Scalar>(h.rows()) *
                       Eigen::NumTraits<Scalar>::epsilon() * (sv.size() > 0 ? sv(0) : Scalar(0));
    *rank_deficient = sv.size() == 0 || sv(sv.size() - 1) <= tol;
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

/// Keep the h rows of F with the largest l2 norms (ties to the smaller
/// index) and zero the rest. `kept` receives the sorted surviving indices;
/// `degenerate` reports that fewer than h rows were nonzero.
template <typename Derived>
Matrix<typename Derived::Scalar> row_topk_projection(const Eigen::MatrixBase<Derived>& f, Index h,
                                                     IndexList* kept = nullptr,
                                                     bool* degenerate = nullptr) {
  using Scalar = typename Derived::Scalar;
  const Index p = f.rows();
  if (h < 0 || h > p) {
    throw std::invalid_argument("row_topk_projection: h out of range");
  }
  std::vector<std::pair<Scalar, Index>> norms(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) {
    norms[static_cast<std::size_t>(i)] = {f.row(i).squaredNorm(), i};
  }
  std::sort(norms.begin(), norms.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  IndexList keep;
  keep.reserve(static_cast<std::size_t>(h));
  Index nonzero_kept = 0;
  for (Index r = 0; r < h; ++r) {
    keep.push_back(norms[static_cast<std::size_t>(r)].second);
    if (norms[static_cast<std::size_t>(r)].first > Scalar(0)) ++nonzero_kept;
  }
  std::sort(keep.begin(), keep.end());

  Matrix<Scalar> w = Matrix<Scalar>::Zero(p, f.cols());
  for (Index i : keep) w.row(i) = f.row(i);
  if (kept != nullptr) *kept = std::move(keep);
  if (degenerate != nullptr) *degenerate = nonzero_kept < h;
  return w;
}

/// Sorted indices of rows with nonzero l2 norm.
template <typename Scalar>
IndexList recover_selection(const Matrix<Scalar>& w) {
  IndexList sel;
  for (Index i = 0; i < w.rows(); ++i) {
    if (w.row(i).squaredNorm() > Scalar(0)) sel.push_back(i);
  }
  return sel;
}

/// V = U = W = top-h eigenvectors of A (sign-normalized), multipliers zero.
/// The bilinear variant starts at mu = cfg.mu0, the quadratic one at
/// lambda_1 + 0.1 so that (mu I - A) starts positive definite.
template <typename Scalar>
AdmmState<Scalar> init_state(const TargetOperator<Scalar>& op, Index h, const AdmmConfig& cfg) {
  const Index p = op.p();
  if (h < 1 || h > p) {
    throw std::invalid_argument("init_state: h out of range [1, p]");
  }
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(op.a);
  if (es.info() != Eigen::Success) {
    throw SolverError("init_state: eigendecomposition of A failed");
  }
  Matrix<Scalar> v0(p, h);
  for (Index j = 0; j < h; ++j) {
    v0.col(j) = es.eigenvectors().col(p - 1 - j);  // descending eigenvalue order
  }
  sign_normalize_columns(v0);

  AdmmState<Scalar> s;
  s.v = v0;
  s.u = v0;
  s.w = std::move(v0);
  s.omega = Matrix<Scalar>::Zero(p, h);
  s.gamma = Matrix<Scalar>::Zero(p, h);
  s.mu = cfg.variant == AdmmVariant::kQuadratic
             ? op.top_eigenvalue + Scalar(0.1)
             : static_cast<Scalar>(cfg.mu0);
  s.iteration = 0;
  s.stable_count = 0;
  s.last_selection = recover_selection(s.w);
  return s;
}

/// Bilinear V-step: M = A U + mu B + mu C with B = U - Omega/mu,
/// C = W - Gamma/mu, then scale M onto the sphere ||V||_F^2 = h.
template <typename Scalar>
Matrix<Scalar> update_v_bilinear(const AdmmState<Scalar>& s, const TargetOperator<Scalar>& op) {
  const Matrix<Scalar> b = s.u - s.omega / s.mu;
  const Matrix<Scalar> c = s.w - s.gamma / s.mu;
  const Matrix<Scalar> m = op.a * s.u + s.mu * b + s.mu * c;
  return sphere_step(m, s.h());
}

/// Bilinear U-step: polar factor of H = A V + mu E, E = V + Omega/mu.
template <typename Scalar>
Matrix<Scalar> update_u_bilinear(const AdmmState<Scalar>& s, const TargetOperator<Scalar>& op,
                                 bool* rank_deficient = nullptr) {
  const Matrix<Scalar> e = s.v + s.omega / s.mu;
  const Matrix<Scalar> h = op.a * s.v + s.mu * e;
  return polar_factor(h, rank_deficient);
}

/// Quadratic V-step: solve (mu I - A) V = mu (B + C) / 2. Requires
/// mu > lambda_1 so the system is positive definite; solved by Cholesky,
/// never by an explicit inverse.
template <typename Scalar>
Matrix<Scalar> update_v_quadratic(const AdmmState<Scalar>& s, const TargetOperator<Scalar>& op) {
  if (!(s.mu > op.top_eigenvalue)) {
    throw SolverError("update_v_quadratic: indefinite system, mu <= top eigenvalue of A");
  }
  Matrix<Scalar> lhs = -op.a;
  lhs.diagonal().array() += s.mu;
  const Matrix<Scalar> b = s.u - s.omega / s.mu;
  const Matrix<Scalar> c = s.w - s.gamma / s.mu;
  const Matrix<Scalar> rhs = (Scalar(0.5) * s.mu) * (b + c);
  Eigen::LLT<Matrix<Scalar>> llt(lhs);
  if (llt.info() != Eigen::Success) {
    throw SolverError("update_v_quadratic: Cholesky factorization of (mu I - A) failed");
  }
  return llt.solve(rhs);
}

/// Quadratic U-step: polar factor of D = V + Omega/mu.
template <typename Scalar>
Matrix<Scalar> update_u_quadratic(const AdmmState<Scalar>& s, bool* rank_deficient = nullptr) {
  const Matrix<Scalar> d = s.v + s.omega / s.mu;
  return polar_factor(d, rank_deficient);
}

/// W-step: row-sparse projection of F = V + Gamma/mu.
template <typename Scalar>
Matrix<Scalar> update_w_topk(const AdmmState<Scalar>& s, IndexList* kept = nullptr,
                             bool* degenerate = nullptr) {
  const Matrix<Scalar> f = s.v + s.gamma / s.mu;
  return row_topk_projection(f, s.h(), kept, degenerate);
}

/// Omega += mu (V - U); Gamma += mu (V - W); mu = min(rho mu, mu_max).
template <typename Scalar>
void update_multipliers(AdmmState<Scalar>& s, const AdmmConfig& cfg) {
  s.omega += s.mu * (s.v - s.u);
  s.gamma += s.mu * (s.v - s.w);
  s.mu = std::min(static_cast<Scalar>(cfg.rho) * s.mu, static_cast<Scalar>(cfg.mu_max));
}

template <typename Scalar>
struct RunResult {
  SelectionResult<Scalar> selection;
  ConvergenceTrace<Scalar> trace;
};

/// Full ADMM loop: V, U, W, multipliers per iteration. Stops when the
/// selection recovered from W is unchanged for `stability_window`
/// consecutive iterations, or at `max_iterations`. The reported objective is
/// the exact discrete -Tr(S^T A S) of the returned indices, not the relaxed
/// iterate value. Deterministic in its inputs.
template <typename Scalar>
RunResult<Scalar> run_admm(const TargetOperator<Scalar>& op, Index h, const AdmmConfig& cfg) {
  AdmmState<Scalar> s = init_state(op, h, cfg);
  RunResult<Scalar> out;
  out.trace.records.reserve(static_cast<std::size_t>(std::min<Index>(cfg.max_iterations, 4096)));

  Termination termination = Termination::kMaxIterations;
  for (Index it = 1; it <= cfg.max_iterations; ++it) {
    bool degenerate_u = false;
    bool degenerate_w = false;
    if (cfg.variant == AdmmVariant::kBilinear) {
      s.v = update_v_bilinear(s, op);
      s.u = update_u_bilinear(s, op, &degenerate_u);
    } else {
      s.v = update_v_quadratic(s, op);
      s.u = update_u_quadratic(s, &degenerate_u);
    }
    s.w = update_w_topk(s, nullptr, &degenerate_w);
    s.iteration = it;

    IndexList selection = recover_selection(s.w);
    const bool changed = selection != s.last_selection;
    if (changed) {
      s.stable_count = 0;
      s.last_selection = std::move(selection);
    } else {
      ++s.stable_count;
    }

    TraceRecord<Scalar> rec;
    rec.iteration = it;
    rec.objective = objective_value(s.v, op);
    rec.v_norm = s.v.norm();
    rec.residual_u = (s.v - s.u).norm();
    rec.residual_w = (s.v - s.w).norm();
    rec.mu = s.mu;
    rec.selection_changed = changed;
    rec.degenerate_u = degenerate_u;
    rec.degenerate_w = degenerate_w;
    out.trace.records.push_back(rec);

    if (s.stable_count >= cfg.stability_window) {
      termination = Termination::kStableSelection;
      break;
    }
    update_multipliers(s, cfg);
  }

  out.selection.indices = s.last_selection;
  out.selection.objective = selection_objective(op, s.last_selection);
  out.selection.iterations = s.iteration;
  out.selection.termination = termination;
  return out;
}

/// Run the quadratic ADMM for a fixed iteration budget with no stability
/// stop, recording ||V||_F each iteration. Exists to exhibit the scale
/// blow-up that motivates the bilinear form.
template <typename Scalar>
ConvergenceTrace<Scalar> run_quadratic_demo(const TargetOperator<Scalar>& op, Index h,
                                            AdmmConfig cfg) {
  cfg.variant = AdmmVariant::kQuadratic;
  AdmmState<Scalar> s = init_state(op, h, cfg);
  ConvergenceTrace<Scalar> trace;
  trace.records.reserve(static_cast<std::size_t>(cfg.max_iterations));

  for (Index it = 1; it <= cfg.max_iterations; ++it) {
    bool degenerate_u = false;
    bool degenerate_w = false;
    s.v = update_v_quadratic(s, op);
    s.u = update_u_quadratic(s, &degenerate_u);
    s.w = update_w_topk(s, nullptr, &degenerate_w);
    s.iteration = it;

    IndexList selection = recover_selection(s.w);
    const bool changed = selection != s.last_selection;
    if (changed) s.last_selection = std::move(selection);

    TraceRecord<Scalar> rec;
    rec.iteration = it;
    rec.objective = objective_value(s.v, op);
    rec.v_norm = s.v.norm();
    rec.residual_u = (s.v - s.u).norm();
    rec.residual_w = (s.v - s.w).norm();
    rec.mu = s.mu;
    rec.selection_changed = changed;
    rec.degenerate_u = degenerate_u;
    rec.degenerate_w = degenerate_w;
    trace.records.push_back(rec);

    update_multipliers(s, cfg);
  }
  return trace;
}

}  // namespace kufs
