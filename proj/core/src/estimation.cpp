#include "msvar/engine.hpp"

#include "msvar/error.hpp"
#include "msvar/rng.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

namespace msvar {

namespace {

constexpr double kTransitionFloor = 1e-6;
constexpr double kInitialStay = 0.8;
constexpr double kMinRegimeWeight = 1e-8;

// Column partition of the design into regime-specific and shared regressors.
struct BlockLayout {
  std::vector<Eigen::Index> switching;
  std::vector<Eigen::Index> common;
  bool covariance_switching = true;

  static BlockLayout make(const ModelSpec& spec, const Design& d) {
    BlockLayout b;
    auto add = [&](Eigen::Index first, Eigen::Index count, BlockMode mode) {
      auto& dst = (spec.n_regimes == 1 || mode == BlockMode::switching) ? b.switching : b.common;
      for (Eigen::Index c = first; c < first + count; ++c) dst.push_back(c);
    };
    add(0, d.intercept_cols, spec.switching.intercept);
    add(d.intercept_cols, d.lag_cols, spec.switching.lag_matrices);
    add(d.intercept_cols + d.lag_cols, d.exog_cols, spec.switching.exog_coefficients);
    b.covariance_switching =
        spec.n_regimes > 1 && spec.switching.covariance == BlockMode::switching;
    return b;
  }
};

Matrix select_cols(const Matrix& A, const std::vector<Eigen::Index>& cols) {
  Matrix out(A.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = A.col(cols[j]);
  return out;
}

void assign_cols(Matrix& A, const std::vector<Eigen::Index>& cols, const Matrix& src) {
  for (std::size_t j = 0; j < cols.size(); ++j) A.col(cols[j]) = src.col(static_cast<Eigen::Index>(j));
}

struct EmState {
  std::vector<Matrix> theta;  // K x (n x d)
  std::vector<Matrix> sigma;  // K x (n x n)
  Matrix P;
  Vector initial;
};

// Adds lambda * trace/n * I with lambda escalating 1e-8 -> 1e-4 when S is
// numerically singular.
Matrix regularize_covariance(Matrix S) {
  S = 0.5 * (S + S.transpose());
  auto acceptable = [](const Matrix& M) {
    if (!M.allFinite()) return false;
    Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
    const double hi = es.eigenvalues().maxCoeff();
    const double lo = es.eigenvalues().minCoeff();
    return hi > 0.0 && lo > 1e-12 * hi;
  };
  if (acceptable(S)) return S;
  const auto n = S.rows();
  const double scale = S.trace() / static_cast<double>(n);
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw NumericalError("covariance estimate collapsed to zero");
  }
  for (double lambda = 1e-8; lambda <= 1e-4 * (1 + 1e-9); lambda *= 10.0) {
    Matrix R = S + lambda * scale * Matrix::Identity(n, n);
    if (acceptable(R)) return R;
  }
  throw NumericalError("covariance estimate is ill-conditioned even after ridge regularization");
}

Matrix log_densities(const Design& d, const EmState& st) {
  const auto K = static_cast<Eigen::Index>(st.theta.size());
  Matrix out(d.T(), K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const Matrix resid = d.Y - d.Z * st.theta[ks].transpose();
    out.col(k) = gaussian_log_density_rows(resid, cholesky_lower(st.sigma[ks]));
  }
  return out;
}

// Constrained multinomial MLE for one transition row with every entry >= floor.
Vector transition_row(const Vector& counts, const Vector& previous) {
  const auto K = counts.size();
  if (!(counts.sum() > 0.0)) return previous;
  std::vector<bool> pinned(static_cast<std::size_t>(K), false);
  Vector row(K);
  for (int pass = 0; pass <= K; ++pass) {
    double free_total = 0.0;
    int n_pinned = 0;
    for (Eigen::Index j = 0; j < K; ++j) {
      if (pinned[static_cast<std::size_t>(j)]) {
        ++n_pinned;
      } else {
        free_total += counts(j);
      }
    }
    const double mass = 1.0 - kTransitionFloor * n_pinned;
    bool changed = false;
    for (Eigen::Index j = 0; j < K; ++j) {
      if (pinned[static_cast<std::size_t>(j)]) {
        row(j) = kTransitionFloor;
        continue;
      }
      row(j) = free_total > 0.0 ? mass * counts(j) / free_total : mass / (K - n_pinned);
      if (row(j) < kTransitionFloor) {
        pinned[static_cast<std::size_t>(j)] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return row / row.sum();
}

// One ECM sweep: switching coefficients by weighted LS per regime, the shared
// block by pooled GLS with the current covariances, then covariances and the
// chain. Each step maximizes the expected complete-data log-likelihood given
// the others, so the observed likelihood cannot decrease.
void m_step(const Design& d, const BlockLayout& layout, const Matrix& gamma,
            const Matrix& pair_counts, const Vector& first_period, EmState& st,
            bool update_chain = true) {
  const auto K = static_cast<Eigen::Index>(st.theta.size());
  const Eigen::Index n = d.Y.cols();
  const Matrix Zs = select_cols(d.Z, layout.switching);
  const Matrix Zc = select_cols(d.Z, layout.common);
  const Eigen::Index dS = Zs.cols();
  const Eigen::Index dC = Zc.cols();

  // (a) Regime-specific coefficients.
  if (dS > 0) {
    for (Eigen::Index k = 0; k < K; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      const auto w = gamma.col(k);
      if (w.sum() < kMinRegimeWeight) continue;
      Matrix target = d.Y;
      if (dC > 0) target -= Zc * select_cols(st.theta[ks], layout.common).transpose();
      const Matrix Zw = Zs.array().colwise() * w.array();
      const Matrix G = Zs.transpose() * Zw;
      Eigen::LDLT<Matrix> ldlt(G);
      if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-13)) continue;
      const Matrix coef = ldlt.solve(Zw.transpose() * target);  // dS x n
      if (!coef.allFinite()) continue;
      assign_cols(st.theta[ks], layout.switching, coef.transpose());
    }
  }

  // (b) Shared coefficients.
  if (dC > 0) {
    std::vector<Matrix> M(static_cast<std::size_t>(K));
    std::vector<Matrix> N(static_cast<std::size_t>(K));
    for (Eigen::Index k = 0; k < K; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      Matrix e = d.Y;
      if (dS > 0) e -= Zs * select_cols(st.theta[ks], layout.switching).transpose();
      const Matrix Zw = Zc.array().colwise() * gamma.col(k).array();
      M[ks] = Zc.transpose() * Zw;      // dC x dC
      N[ks] = e.transpose() * Zw;       // n x dC
    }
    Matrix phi;
    if (!layout.covariance_switching) {
      Matrix Ms = Matrix::Zero(dC, dC);
      Matrix Ns = Matrix::Zero(n, dC);
      for (Eigen::Index k = 0; k < K; ++k) {
        Ms += M[static_cast<std::size_t>(k)];
        Ns += N[static_cast<std::size_t>(k)];
      }
      Eigen::LDLT<Matrix> ldlt(Ms);
      if (ldlt.info() == Eigen::Success && ldlt.rcond() > 1e-13) {
        phi = ldlt.solve(Ns.transpose()).transpose();
      }
    } else {
      // sum_k (M_k kron S_k^{-1}) vec(Phi) = sum_k vec(S_k^{-1} N_k)
      const Eigen::Index q = n * dC;
      Matrix H = Matrix::Zero(q, q);
      Vector b = Vector::Zero(q);
      for (Eigen::Index k = 0; k < K; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const Matrix Sinv = st.sigma[ks].llt().solve(Matrix::Identity(n, n));
        for (Eigen::Index a = 0; a < dC; ++a) {
          for (Eigen::Index c = 0; c < dC; ++c) {
            H.block(a * n, c * n, n, n) += M[ks](a, c) * Sinv;
          }
        }
        const Matrix SN = Sinv * N[ks];
        b += Eigen::Map<const Vector>(SN.data(), q);
      }
      Eigen::LDLT<Matrix> ldlt(H);
      if (ldlt.info() == Eigen::Success && ldlt.rcond() > 1e-13) {
        const Vector v = ldlt.solve(b);
        phi = Eigen::Map<const Matrix>(v.data(), n, dC);
      }
    }
    if (phi.size() > 0 && phi.allFinite()) {
      for (auto& th : st.theta) assign_cols(th, layout.common, phi);
    }
  }

  // (c) Covariances.
  const double T = static_cast<double>(d.T());
  Matrix pooled = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const Matrix u = d.Y - d.Z * st.theta[ks].transpose();
    const Matrix uw = u.array().colwise() * gamma.col(k).array();
    const Matrix outer = u.transpose() * uw;
    if (layout.covariance_switching) {
      const double wsum = gamma.col(k).sum();
      if (wsum >= kMinRegimeWeight) st.sigma[ks] = regularize_covariance(outer / wsum);
    } else {
      pooled += outer;
    }
  }
  if (!layout.covariance_switching) {
    const Matrix S = regularize_covariance(pooled / T);
    for (auto& s : st.sigma) s = S;
  }

  // (d) Chain.
  if (update_chain) {
    for (Eigen::Index i = 0; i < K; ++i) {
      st.P.row(i) = transition_row(pair_counts.row(i).transpose(), st.P.row(i).transpose()).transpose();
    }
    st.initial = first_period;
  }
}

struct RunResult {
  EmState state;
  FilterOutput filter;
  SmootherOutput smoother;
  std::vector<double> trace;
  bool converged = false;
  int iterations = 0;
};

Matrix pairwise_total(const SmootherOutput& s, Eigen::Index K) {
  Matrix total = Matrix::Zero(K, K);
  for (const auto& m : s.pairwise_probs) total += m;
  return total;
}

RunResult run_em(const Design& d, const BlockLayout& layout, EmState st, const EmOptions& opt) {
  RunResult r;
  const auto K = static_cast<Eigen::Index>(st.theta.size());
  r.filter = hamilton_filter_from_densities(log_densities(d, st), st.P, st.initial);
  r.smoother = kim_smoother(r.filter, st.P);
  r.trace.push_back(r.filter.log_likelihood);
  for (int it = 1; it <= opt.max_iter; ++it) {
    m_step(d, layout, r.smoother.smoothed_probs, pairwise_total(r.smoother, K),
           r.smoother.smoothed_probs.row(0).transpose(), st);
    const double previous = r.trace.back();
    r.filter = hamilton_filter_from_densities(log_densities(d, st), st.P, st.initial);
    r.smoother = kim_smoother(r.filter, st.P);
    r.trace.push_back(r.filter.log_likelihood);
    r.iterations = it;
    if (r.trace.back() - previous < opt.tol * std::max(1.0, std::abs(previous))) {
      r.converged = true;
      break;
    }
  }
  r.state = std::move(st);
  return r;
}

struct OlsBaseline {
  Matrix theta;  // n x d
  Matrix sigma;
  Matrix residuals;
};

OlsBaseline ols_baseline(const Design& d, const ModelSpec& spec) {
  Eigen::ColPivHouseholderQR<Matrix> qr(d.Z);
  qr.setThreshold(1e-10);
  if (qr.rank() < d.Z.cols()) {
    const int bad = first_dependent_column(d.Z);
    std::string name = "column " + std::to_string(bad);
    const Eigen::Index n = static_cast<Eigen::Index>(spec.n());
    if (bad >= 0) {
      const Eigen::Index b = bad;
      if (b < d.intercept_cols) {
        name = "intercept";
      } else if (b < d.intercept_cols + d.lag_cols) {
        const Eigen::Index off = b - d.intercept_cols;
        name = spec.endogenous[static_cast<std::size_t>(off % n)] + "(-" + std::to_string(off / n + 1) + ")";
      } else {
        name = spec.exogenous[static_cast<std::size_t>(b - d.intercept_cols - d.lag_cols)];
      }
    }
    throw NumericalError("regressor matrix is rank deficient: " + name +
                         " is collinear with preceding regressors");
  }
  OlsBaseline b;
  b.theta = qr.solve(d.Y).transpose();
  b.residuals = d.Y - d.Z * b.theta.transpose();
  b.sigma = b.residuals.transpose() * b.residuals / static_cast<double>(d.T());
  b.sigma = 0.5 * (b.sigma + b.sigma.transpose());
  return b;
}

Matrix initial_transition(Eigen::Index K) {
  if (K == 1) return Matrix::Ones(1, 1);
  Matrix P = Matrix::Constant(K, K, (1.0 - kInitialStay) / static_cast<double>(K - 1));
  P.diagonal().setConstant(kInitialStay);
  return P;
}

// Initial state from a hard regime assignment.
EmState state_from_assignment(const Design& d, const BlockLayout& layout, const OlsBaseline& ols,
                              const std::vector<int>& assignment, Eigen::Index K) {
  EmState st;
  st.theta.assign(static_cast<std::size_t>(K), ols.theta);
  st.sigma.assign(static_cast<std::size_t>(K), regularize_covariance(ols.sigma));
  st.P = initial_transition(K);
  st.initial = Vector::Constant(K, 1.0 / static_cast<double>(K));
  Matrix gamma = Matrix::Zero(d.T(), K);
  for (Eigen::Index t = 0; t < d.T(); ++t) gamma(t, assignment[static_cast<std::size_t>(t)]) = 1.0;
  const Matrix no_counts = Matrix::Zero(K, K);
  for (int sweep = 0; sweep < 3; ++sweep) {
    m_step(d, layout, gamma, no_counts, st.initial, st, false);
  }
  return st;
}

void jitter_switching(EmState& st, const BlockLayout& layout, const Design& d, const OlsBaseline& ols,
                      Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index n = d.Y.cols();
  const Vector sd = ols.sigma.diagonal().cwiseSqrt();
  for (auto& theta : st.theta) {
    for (Eigen::Index c : layout.switching) {
      const bool is_lag = c >= d.intercept_cols && c < d.intercept_cols + d.lag_cols;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double scale = is_lag ? std::abs(theta(i, c)) : std::max(std::abs(theta(i, c)), sd(i));
        theta(i, c) += 0.05 * scale * normal(rng);
      }
    }
  }
}

// Lloyd k-means on the standardized observations. Centers start at first
// principal component quantiles, or from k-means++ draws when `rng` is given.
std::vector<int> level_clusters(const Matrix& Y, Eigen::Index K, Rng* rng) {
  const Eigen::Index T = Y.rows();
  const Vector mean = Y.colwise().mean().transpose();
  Matrix X = Y.rowwise() - mean.transpose();
  const Vector sd = (X.array().square().colwise().sum() / static_cast<double>(T)).sqrt().matrix().transpose();
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (sd(j) > 0.0) X.col(j) /= sd(j);
  }
  Matrix centers(K, X.cols());
  if (rng == nullptr) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(X.transpose() * X);
    const Vector score = X * es.eigenvectors().col(X.cols() - 1);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(T));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return score(a) < score(b); });
    for (Eigen::Index k = 0; k < K; ++k) {
      const Eigen::Index lo = (k * T) / K;
      const Eigen::Index hi = ((k + 1) * T) / K;
      Vector c = Vector::Zero(X.cols());
      for (Eigen::Index r = lo; r < hi; ++r) c += X.row(order[static_cast<std::size_t>(r)]).transpose();
      centers.row(k) = (c / static_cast<double>(std::max<Eigen::Index>(hi - lo, 1))).transpose();
    }
  } else {
    std::uniform_int_distribution<Eigen::Index> pick(0, T - 1);
    centers.row(0) = X.row(pick(*rng));
    Vector dist(T);
    for (Eigen::Index k = 1; k < K; ++k) {
      for (Eigen::Index t = 0; t < T; ++t) {
        dist(t) = (centers.topRows(k).rowwise() - X.row(t)).rowwise().squaredNorm().minCoeff();
      }
      if (!(dist.sum() > 0.0)) {
        centers.row(k) = X.row(pick(*rng));
        continue;
      }
      std::discrete_distribution<Eigen::Index> draw(dist.data(), dist.data() + T);
      centers.row(k) = X.row(draw(*rng));
    }
  }
  std::vector<int> a(static_cast<std::size_t>(T), 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (Eigen::Index t = 0; t < T; ++t) {
      Eigen::Index best = 0;
      (centers.rowwise() - X.row(t)).rowwise().squaredNorm().minCoeff(&best);
      if (a[static_cast<std::size_t>(t)] != static_cast<int>(best)) {
        a[static_cast<std::size_t>(t)] = static_cast<int>(best);
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    Matrix sum = Matrix::Zero(K, X.cols());
    Vector count = Vector::Zero(K);
    for (Eigen::Index t = 0; t < T; ++t) {
      sum.row(a[static_cast<std::size_t>(t)]) += X.row(t);
      count(a[static_cast<std::size_t>(t)]) += 1.0;
    }
    for (Eigen::Index k = 0; k < K; ++k) {
      if (count(k) > 0.0) centers.row(k) = sum.row(k) / count(k);
    }
  }
  return a;
}

EmState initial_state(const Design& d, const BlockLayout& layout, const OlsBaseline& ols,
                      InitStrategy strategy, int restart, Eigen::Index K, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index T = d.T();
  switch (strategy) {
    case InitStrategy::time_blocks: {
      std::vector<int> a(static_cast<std::size_t>(T));
      for (Eigen::Index t = 0; t < T; ++t) a[static_cast<std::size_t>(t)] = static_cast<int>((t * K) / T);
      EmState st = state_from_assignment(d, layout, ols, a, K);
      if (restart > 0) jitter_switching(st, layout, d, ols, rng);
      return st;
    }
    case InitStrategy::residual_sorted: {
      Eigen::SelfAdjointEigenSolver<Matrix> es(ols.sigma);
      const Vector direction = es.eigenvectors().col(ols.sigma.rows() - 1);
      const Vector score = ols.residuals * direction;
      std::vector<Eigen::Index> order(static_cast<std::size_t>(T));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](Eigen::Index a, Eigen::Index b) { return score(a) < score(b); });
      std::vector<int> a(static_cast<std::size_t>(T));
      for (Eigen::Index r = 0; r < T; ++r) {
        a[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = static_cast<int>((r * K) / T);
      }
      EmState st = state_from_assignment(d, layout, ols, a, K);
      if (restart > 0) jitter_switching(st, layout, d, ols, rng);
      return st;
    }
    case InitStrategy::level_clusters: {
      const auto a = level_clusters(d.Y, K, restart > 2 ? &rng : nullptr);
      return state_from_assignment(d, layout, ols, a, K);
    }
    case InitStrategy::perturbed_ols:
    case InitStrategy::automatic: {
      EmState st;
      st.theta.assign(static_cast<std::size_t>(K), ols.theta);
      const Matrix base = regularize_covariance(ols.sigma);
      for (Eigen::Index k = 0; k < K; ++k) {
        double factor = 1.0;
        if (layout.covariance_switching && K > 1) {
          factor = 0.5 * std::pow(4.0, static_cast<double>(k) / static_cast<double>(K - 1));
        }
        st.sigma.push_back(factor * base);
      }
      st.P = initial_transition(K);
      st.initial = Vector::Constant(K, 1.0 / static_cast<double>(K));
      jitter_switching(st, layout, d, ols, rng);
      return st;
    }
  }
  throw ValidationError("unknown initialization strategy");
}

InitStrategy strategy_for_restart(InitStrategy requested, int restart) {
  if (requested != InitStrategy::automatic) return requested;
  if (restart == 0) return InitStrategy::time_blocks;
  if (restart == 1) return InitStrategy::residual_sorted;
  if (restart == 2 || restart % 2 == 1) return InitStrategy::level_clusters;
  return InitStrategy::perturbed_ols;
}

MsVarParameters to_parameters(const ModelSpec& spec, const EmState& st) {
  MsVarParameters p;
  p.spec = spec;
  for (std::size_t k = 0; k < st.theta.size(); ++k) {
    RegimeParameterSet r;
    unstack_coefficients(spec, st.theta[k], r);
    r.covariance = st.sigma[k];
    p.regimes.push_back(std::move(r));
  }
  p.transition.P = st.P;
  p.initial_probs = st.initial;
  return p;
}

Matrix permute_columns(const Matrix& A, const std::vector<int>& order) {
  Matrix out(A.rows(), A.cols());
  for (std::size_t r = 0; r < order.size(); ++r) out.col(static_cast<Eigen::Index>(r)) = A.col(order[r]);
  return out;
}

}  // namespace

int minimum_effective_sample(const ModelSpec& spec) {
  const int n = static_cast<int>(spec.n());
  const int d = (spec.include_intercept ? 1 : 0) + n * spec.lag_order + static_cast<int>(spec.m());
  if (spec.n_regimes == 1) return d + 1;
  int per_regime = 0;
  if (spec.include_intercept && spec.switching.intercept == BlockMode::switching) per_regime += n;
  if (spec.switching.lag_matrices == BlockMode::switching) per_regime += n * n * spec.lag_order;
  if (spec.switching.exog_coefficients == BlockMode::switching) per_regime += n * static_cast<int>(spec.m());
  if (spec.switching.covariance == BlockMode::switching) per_regime += n * (n + 1) / 2;
  const int floor = (per_regime + spec.n_regimes - 1) / spec.n_regimes;
  return std::max(d + 1, floor);
}

std::vector<int> chronological_order(const Matrix& smoothed, const MsVarParameters& params) {
  const Eigen::Index K = smoothed.cols();
  std::vector<Eigen::Index> first_peak(static_cast<std::size_t>(K), 0);
  std::vector<double> log_det(static_cast<std::size_t>(K), 0.0);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double peak = smoothed.col(k).maxCoeff();
    Eigen::Index t = 0;
    while (t < smoothed.rows() && smoothed(t, k) < peak - 1e-9) ++t;
    first_peak[static_cast<std::size_t>(k)] = t;
    const Matrix L = cholesky_lower(params.regimes[static_cast<std::size_t>(k)].covariance);
    log_det[static_cast<std::size_t>(k)] = 2.0 * L.diagonal().array().log().sum();
  }
  std::vector<int> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto sa = static_cast<std::size_t>(a);
    const auto sb = static_cast<std::size_t>(b);
    if (first_peak[sa] != first_peak[sb]) return first_peak[sa] < first_peak[sb];
    return log_det[sa] < log_det[sb];
  });
  return order;
}

EstimatedMsVar em_fit(const ModelSpec& spec, const ModelDataset& data, const EmOptions& options,
                      EmDiagnostics* diagnostics) {
  spec.validate();
  if (options.n_restarts < 1) throw ValidationError("em_fit: n_restarts must be >= 1");
  if (options.max_iter < 1) throw ValidationError("em_fit: max_iter must be >= 1");
  if (!(options.tol > 0.0)) throw ValidationError("em_fit: tol must be positive");
  const Design d = Design::build(spec, data);
  const int needed = minimum_effective_sample(spec);
  if (d.T() < needed) {
    throw ValidationError("em_fit: effective sample of " + std::to_string(d.T()) +
                          " periods is below the minimum of " + std::to_string(needed) + " for " +
                          std::to_string(spec.n()) + " variables, " + std::to_string(d.d()) +
                          " regressors per equation and " + std::to_string(spec.n_regimes) +
                          " regimes");
  }
  const BlockLayout layout = BlockLayout::make(spec, d);
  const OlsBaseline ols = ols_baseline(d, spec);
  const auto K = static_cast<Eigen::Index>(spec.K());
  const int restarts = spec.n_regimes == 1 ? 1 : options.n_restarts;

  struct Attempt {
    std::optional<RunResult> result;
    std::string failure;
    InitStrategy strategy;
  };
  auto attempt = [&](int r) {
    Attempt a;
    a.strategy = strategy_for_restart(options.init, r);
    try {
      EmState st = initial_state(d, layout, ols, a.strategy, r, K,
                                 split_seed(options.seed, static_cast<std::uint64_t>(r)));
      a.result = run_em(d, layout, std::move(st), options);
    } catch (const NumericalError& e) {
      a.failure = e.what();
    }
    return a;
  };

  std::vector<Attempt> attempts;
  if (options.parallel && restarts > 1) {
    std::vector<std::future<Attempt>> futures;
    for (int r = 0; r < restarts; ++r) futures.push_back(std::async(std::launch::async, attempt, r));
    for (auto& f : futures) attempts.push_back(f.get());
  } else {
    for (int r = 0; r < restarts; ++r) attempts.push_back(attempt(r));
  }

  int best = -1;
  for (int r = 0; r < restarts; ++r) {
    const auto& a = attempts[static_cast<std::size_t>(r)];
    if (!a.result) continue;
    if (best < 0 || a.result->trace.back() > attempts[static_cast<std::size_t>(best)].result->trace.back()) {
      best = r;
    }
  }
  if (diagnostics) {
    diagnostics->restarts.clear();
    for (const auto& a : attempts) {
      RestartSummary s;
      s.strategy = a.strategy;
      s.failure = a.failure;
      if (a.result) {
        s.log_likelihood = a.result->trace.back();
        s.iterations = a.result->iterations;
        s.converged = a.result->converged;
      }
      diagnostics->restarts.push_back(std::move(s));
    }
    diagnostics->best_restart = best;
  }
  if (best < 0) {
    throw NumericalError("em_fit: every restart failed; first failure: " + attempts.front().failure);
  }

  RunResult& run = *attempts[static_cast<std::size_t>(best)].result;
  MsVarParameters params = to_parameters(spec, run.state);
  const auto order = chronological_order(run.smoother.smoothed_probs, params);

  EstimatedMsVar fit;
  fit.params = params.permuted(order);
  fit.smoothed_probs = permute_columns(run.smoother.smoothed_probs, order);
  fit.filtered_probs = permute_columns(run.filter.filtered_probs, order);
  fit.log_likelihood = run.trace.back();
  fit.em_trace = std::move(run.trace);
  fit.converged = run.converged;
  fit.restarts_used = restarts;
  fit.iterations = run.iterations;
  fit.year_index = data.effective_years();
  fit.warnings = run.smoother.warnings;
  if (!fit.converged) {
    fit.warnings.push_back("EM reached max_iter=" + std::to_string(options.max_iter) +
                           " before converging");
  }
  if (options.standard_errors) {
    fit.standard_errors = approximate_standard_errors(fit.params, data);
  }
  return fit;
}

EstimatedMsVar ols_var_fit(const ModelSpec& spec, const ModelDataset& data) {
  spec.validate();
  if (spec.n_regimes != 1) throw ValidationError("ols_var_fit requires n_regimes == 1");
  const Design d = Design::build(spec, data);
  if (d.T() <= d.d()) throw ValidationError("ols_var_fit: more regressors than observations");
  const OlsBaseline ols = ols_baseline(d, spec);

  EstimatedMsVar fit;
  fit.params.spec = spec;
  RegimeParameterSet r;
  unstack_coefficients(spec, ols.theta, r);
  r.covariance = ols.sigma;
  fit.params.regimes.push_back(std::move(r));
  fit.params.transition.P = Matrix::Ones(1, 1);
  fit.params.initial_probs = Vector::Ones(1);
  const FilterOutput f = hamilton_filter(fit.params, data);
  fit.filtered_probs = f.filtered_probs;
  fit.smoothed_probs = kim_smoother(f, fit.params.transition.P).smoothed_probs;
  fit.log_likelihood = f.log_likelihood;
  fit.em_trace = {f.log_likelihood};
  fit.converged = true;
  fit.restarts_used = 0;
  fit.year_index = data.effective_years();
  return fit;
}

std::vector<CoefficientErrors> approximate_standard_errors(const MsVarParameters& params,
                                                           const ModelDataset& data) {
  params.validate();
  const auto& spec = params.spec;
  const Design d = Design::build(spec, data);
  const BlockLayout layout = BlockLayout::make(spec, d);
  const auto K = static_cast<Eigen::Index>(spec.K());
  const Eigen::Index n = d.Y.cols();

  EmState base;
  for (const auto& r : params.regimes) {
    base.theta.push_back(stack_coefficients(spec, r));
    base.sigma.push_back(r.covariance);
  }
  base.P = params.transition.P;
  base.initial = params.initial_probs;

  // Free coefficients: switching columns per regime, then shared columns once.
  struct Coord {
    Eigen::Index regime;  // -1 for shared
    Eigen::Index row;
    Eigen::Index col;
  };
  std::vector<Coord> coords;
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index c : layout.switching) {
      for (Eigen::Index i = 0; i < n; ++i) coords.push_back({k, i, c});
    }
  }
  for (Eigen::Index c : layout.common) {
    for (Eigen::Index i = 0; i < n; ++i) coords.push_back({-1, i, c});
  }
  const auto m = static_cast<Eigen::Index>(coords.size());

  std::vector<Matrix> chol;
  for (const auto& s : base.sigma) chol.push_back(cholesky_lower(s));
  auto value = [&](const Coord& c, const EmState& st) {
    const auto k = static_cast<std::size_t>(c.regime < 0 ? 0 : c.regime);
    return st.theta[k](c.row, c.col);
  };
  auto shift = [&](EmState& st, const Coord& c, double delta) {
    if (c.regime < 0) {
      for (auto& th : st.theta) th(c.row, c.col) += delta;
    } else {
      st.theta[static_cast<std::size_t>(c.regime)](c.row, c.col) += delta;
    }
  };
  auto loglik = [&](const EmState& st) {
    Matrix dens(d.T(), K);
    for (Eigen::Index k = 0; k < K; ++k) {
      const Matrix resid = d.Y - d.Z * st.theta[static_cast<std::size_t>(k)].transpose();
      dens.col(k) = gaussian_log_density_rows(resid, chol[static_cast<std::size_t>(k)]);
    }
    return hamilton_filter_from_densities(dens, st.P, st.initial).log_likelihood;
  };

  std::vector<double> h(static_cast<std::size_t>(m));
  for (Eigen::Index a = 0; a < m; ++a) {
    h[static_cast<std::size_t>(a)] = 1e-5 * std::max(std::abs(value(coords[static_cast<std::size_t>(a)], base)), 1.0);
  }
  const double f0 = loglik(base);
  Matrix H(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto& ca = coords[static_cast<std::size_t>(a)];
    const double ha = h[static_cast<std::size_t>(a)];
    EmState plus = base, minus = base;
    shift(plus, ca, ha);
    shift(minus, ca, -ha);
    H(a, a) = (loglik(plus) - 2.0 * f0 + loglik(minus)) / (ha * ha);
    for (Eigen::Index b = a + 1; b < m; ++b) {
      const auto& cb = coords[static_cast<std::size_t>(b)];
      const double hb = h[static_cast<std::size_t>(b)];
      EmState pp = plus, pm = plus, mp = minus, mm = minus;
      shift(pp, cb, hb);
      shift(pm, cb, -hb);
      shift(mp, cb, hb);
      shift(mm, cb, -hb);
      H(a, b) = H(b, a) = (loglik(pp) - loglik(pm) - loglik(mp) + loglik(mm)) / (4.0 * ha * hb);
    }
  }

  Vector se = Vector::Constant(m, std::numeric_limits<double>::quiet_NaN());
  const Matrix info = -H;
  Eigen::LLT<Matrix> llt(info);
  if (llt.info() == Eigen::Success) {
    se = llt.solve(Matrix::Identity(m, m)).diagonal().cwiseSqrt();
  }

  std::vector<Matrix> se_theta(static_cast<std::size_t>(K),
                               Matrix::Constant(n, d.d(), std::numeric_limits<double>::quiet_NaN()));
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto& c = coords[static_cast<std::size_t>(a)];
    if (c.regime < 0) {
      for (auto& s : se_theta) s(c.row, c.col) = se(a);
    } else {
      se_theta[static_cast<std::size_t>(c.regime)](c.row, c.col) = se(a);
    }
  }
  std::vector<CoefficientErrors> out;
  for (const auto& s : se_theta) {
    RegimeParameterSet tmp;
    unstack_coefficients(spec, s, tmp);
    out.push_back({tmp.intercept, tmp.lags, tmp.exog});
  }
  return out;
}

}  // namespace msvar
