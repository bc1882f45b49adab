#include <algorithm>
#include <cmath>
#include <vector>

#include "structpen/penalties.hpp"

namespace structpen {

namespace {

// --------------------------------------------------------------------------
// Banded SPD storage and LDL^T. band(d, j) = M(j + d, j), d = 0..bw.
// The Hessians here are diag + A^T D A, whose bandwidth equals the widest
// row support of A, so W^k cones factor in O(n k^2) instead of O(n^3).

struct BandMatrix {
  int n = 0;
  int bw = 0;
  std::vector<double> data;

  void resize(int n_, int bw_) {
    n = n_;
    bw = bw_;
    data.assign(static_cast<std::size_t>(bw + 1) * n, 0.0);
  }
  void zero() { std::fill(data.begin(), data.end(), 0.0); }
  double& at(int d, int j) {
    return data[static_cast<std::size_t>(j) * (bw + 1) + d];
  }
  double at(int d, int j) const {
    return data[static_cast<std::size_t>(j) * (bw + 1) + d];
  }
};

bool band_ldlt(BandMatrix& M) {
  const int n = M.n;
  const int bw = M.bw;
  for (int j = 0; j < n; ++j) {
    double d = M.at(0, j);
    for (int k = std::max(0, j - bw); k < j; ++k) {
      const double l = M.at(j - k, k);
      d -= l * l * M.at(0, k);
    }
    if (!(d > 0.0)) return false;
    M.at(0, j) = d;
    const int imax = std::min(n - 1, j + bw);
    for (int i = j + 1; i <= imax; ++i) {
      double v = M.at(i - j, j);
      for (int k = std::max(0, i - bw); k < j; ++k)
        v -= M.at(i - k, k) * M.at(j - k, k) * M.at(0, k);
      M.at(i - j, j) = v / d;
    }
  }
  return true;
}

void band_solve(const BandMatrix& M, Vector& x) {
  const int n = M.n;
  const int bw = M.bw;
  for (int i = 0; i < n; ++i) {
    double v = x[i];
    for (int k = std::max(0, i - bw); k < i; ++k) v -= M.at(i - k, k) * x[k];
    x[i] = v;
  }
  for (int i = 0; i < n; ++i) x[i] /= M.at(0, i);
  for (int i = n - 1; i >= 0; --i) {
    double v = x[i];
    const int kmax = std::min(n - 1, i + bw);
    for (int k = i + 1; k <= kmax; ++k) v -= M.at(k - i, i) * x[k];
    x[i] = v;
  }
}

// --------------------------------------------------------------------------
// Row supports of A and the bandwidth of diag + A^T D A.

struct RowSupport {
  int first = 0;
  int last = -1;  // empty row: last < first
};

struct ConeStructure {
  std::vector<RowSupport> rows;
  int bandwidth = 0;  // of the Hessian
  bool use_band = false;
};

ConeStructure analyze(const Matrix& A) {
  ConeStructure s;
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  s.rows.resize(m);
  for (int r = 0; r < m; ++r) {
    int first = n, last = -1;
    for (int j = 0; j < n; ++j) {
      if (A(r, j) != 0.0) {
        first = std::min(first, j);
        last = j;
      }
    }
    s.rows[r] = {first, last};
    if (last >= first) s.bandwidth = std::max(s.bandwidth, last - first);
  }
  s.use_band = (s.bandwidth + 1) * 3 < n;
  return s;
}

// --------------------------------------------------------------------------
// Barrier objective F(l) = Gamma(beta, l) - t sum ln(A l)_j - t sum ln(l - f)

struct Barrier {
  const Matrix& A;
  const ConeStructure& structure;
  const Vector& beta2;  // squared entries
  double t;
  double floorv;

  double value(const Vector& lam, const Vector& r) const {
    double v = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      v += 0.5 * (beta2[i] / lam[i] + lam[i]);
      v -= t * std::log(lam[i] - floorv);
    }
    for (Eigen::Index j = 0; j < r.size(); ++j) v -= t * std::log(r[j]);
    return v;
  }

  Vector gradient(const Vector& lam, const Vector& r) const {
    Vector g(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      g[i] = 0.5 * (1.0 - beta2[i] / (lam[i] * lam[i])) -
             t / (lam[i] - floorv);
    if (A.rows() > 0) {
      const Vector rinv = r.cwiseInverse();
      g.noalias() -= t * (A.transpose() * rinv);
    }
    return g;
  }
};

// One damped Newton descent for fixed (t, floor). lam updated in place;
// returns the number of Newton steps taken.
int newton_stage(const Barrier& bar, Vector& lam, int max_steps,
                 double stage_tol) {
  const Matrix& A = bar.A;
  const int n = static_cast<int>(lam.size());
  const int m = static_cast<int>(A.rows());
  BandMatrix Hband;
  Matrix Hdense;
  Vector r = (m > 0) ? Vector(A * lam) : Vector(0);
  double fval = bar.value(lam, r);

  int steps = 0;
  for (; steps < max_steps; ++steps) {
    const Vector g = bar.gradient(lam, r);

    Vector d = -g;
    bool factored = false;
    double ridge = 0.0;
    for (int attempt = 0; attempt < 4 && !factored; ++attempt) {
      if (bar.structure.use_band) {
        Hband.resize(n, bar.structure.bandwidth);
        for (int i = 0; i < n; ++i) {
          const double li = lam[i] - bar.floorv;
          Hband.at(0, i) = bar.beta2[i] / (lam[i] * lam[i] * lam[i]) +
                           bar.t / (li * li) + ridge;
        }
        for (int rr = 0; rr < m; ++rr) {
          const auto& sup = bar.structure.rows[rr];
          const double w = bar.t / (r[rr] * r[rr]);
          for (int i = sup.first; i <= sup.last; ++i) {
            const double wi = w * A(rr, i);
            if (wi == 0.0) continue;
            for (int j = sup.first; j <= i; ++j)
              Hband.at(i - j, j) += wi * A(rr, j);
          }
        }
        if (band_ldlt(Hband)) {
          band_solve(Hband, d);
          factored = true;
        }
      } else {
        Hdense = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
          const double li = lam[i] - bar.floorv;
          Hdense(i, i) = bar.beta2[i] / (lam[i] * lam[i] * lam[i]) +
                         bar.t / (li * li) + ridge;
        }
        if (m > 0) {
          const Vector rinv = r.cwiseInverse();
          const Matrix B = rinv.asDiagonal() * A;
          Hdense.noalias() += bar.t * (B.transpose() * B);
        }
        Eigen::LLT<Matrix> llt(Hdense);
        if (llt.info() == Eigen::Success) {
          d = llt.solve(-g);
          factored = true;
        }
      }
      if (!factored) {
        d = -g;
        ridge = (ridge == 0.0) ? 1e-10 : ridge * 1e4;
      }
    }
    if (!factored) d = -g;  // gradient fallback

    const double dec = -g.dot(d);
    if (!(dec > 0.0)) break;
    if (dec * 0.5 < stage_tol * (1.0 + std::abs(fval))) break;

    // fraction to boundary
    double alpha = 1.0;
    for (int i = 0; i < n; ++i)
      if (d[i] < 0.0)
        alpha = std::min(alpha, 0.995 * (bar.floorv - lam[i]) / d[i]);
    Vector Ad;
    if (m > 0) {
      Ad = A * d;
      for (int j = 0; j < m; ++j)
        if (Ad[j] < 0.0) alpha = std::min(alpha, 0.995 * (-r[j] / Ad[j]));
    }

    // Armijo backtracking
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Vector cand = lam + alpha * d;
      Vector rc = (m > 0) ? Vector(r + alpha * Ad) : Vector(0);
      const double fc = bar.value(cand, rc);
      if (std::isfinite(fc) && fc <= fval - 0.25 * alpha * dec) {
        lam = std::move(cand);
        r = std::move(rc);
        fval = fc;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }
  return steps;
}

double gamma_unchecked(const Vector& beta2, const Vector& lam) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    v += 0.5 * (beta2[i] / lam[i] + lam[i]);
  return v;
}

// Runs the joint (t, floor) continuation from a strictly feasible start.
Vector barrier_continuation(const Matrix& A, const ConeStructure& structure,
                            const Vector& beta2, Vector lam,
                            const ConeSolveConfig& cfg, double t0,
                            double floor0) {
  int budget = cfg.max_newton;
  double t = t0;
  double floorv = floor0;
  // stage accuracy tracks cfg.tol; the floor keeps the default behavior tight
  const double stage_tol = std::min(1e-13, 5e-3 * cfg.tol);
  while (true) {
    Barrier bar{A, structure, beta2, t, floorv};
    const int used = newton_stage(bar, lam, std::min(budget, 200), stage_tol);
    budget -= used;
    if (budget <= 0)
      throw NonConvergenceError("cone penalty: Newton budget exhausted");
    if (t <= cfg.barrier_tmin) break;
    t = std::max(t * 0.1, cfg.barrier_tmin);
    if (cfg.floor_continuation)
      floorv = std::max(floorv * 0.1, cfg.floor_min);
  }
  return lam;
}

Vector prepare_start(const ConeSpec& cone, const Vector& beta,
                     double floor_needed) {
  Vector lam = cone_strictly_feasible_point(cone);
  const double bmax = beta.lpNorm<Eigen::Infinity>();
  const double lmax = lam.lpNorm<Eigen::Infinity>();
  if (bmax > 0.0 && lmax > 0.0) lam *= std::max(bmax, 1.0) / lmax;
  const double lmin = lam.minCoeff();
  if (lmin <= 2.0 * floor_needed)
    lam *= (4.0 * floor_needed + 1e-30) / std::max(lmin, 1e-300);
  return lam;
}

}  // namespace

// --------------------------------------------------------------------------

Vector cone_strictly_feasible_point(const ConeSpec& cone) {
  check_matrix(cone.A, "cone.A");
  const int n = cone.cols();
  const int m = cone.rows();
  require(n >= 1, "cone: empty dimension");
  if (m == 0) return Vector::Ones(n);

  Vector row_scale(m);
  for (int j = 0; j < m; ++j)
    row_scale[j] = std::max(cone.A.row(j).cwiseAbs().sum(), 1e-300);

  auto margin = [&](const Vector& lam) {
    const Vector r = cone.A * lam;
    double worst = std::numeric_limits<double>::infinity();
    const double lmax = lam.lpNorm<Eigen::Infinity>();
    for (int j = 0; j < m; ++j)
      worst = std::min(worst, r[j] / (row_scale[j] * lmax));
    return worst;
  };

  std::vector<Vector> candidates;
  candidates.push_back(Vector::Ones(n));
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + static_cast<double>(n - 1 - i) / n;
  candidates.push_back(v);  // ramp down
  candidates.push_back(v.reverse());
  for (int i = 0; i < n; ++i)
    v[i] = std::exp(2.0 * static_cast<double>(i + 1) / n);
  candidates.push_back(v);  // geometric up: strictly inside every W^k
  candidates.push_back(v.reverse());
  for (const Vector& cand : candidates)
    if (margin(cand) > 1e-9) return cand;

  // Phase-I: maximize the margin s subject to A*lam >= s, lam in (lo, hi)^n.
  const double lo = 1e-6;
  const double hi = 1e3;
  Vector lam = Vector::Ones(n);
  double s = (cone.A * lam).minCoeff() - 1.0;

  const int dim = n + 1;
  Vector x(dim);
  x.head(n) = lam;
  x[n] = s;

  auto residuals = [&](const Vector& xv) {
    return Vector(cone.A * xv.head(n) - Vector::Constant(m, xv[n]));
  };

  for (double t = 1.0; t <= 1e10; t *= 10.0) {
    for (int step = 0; step < 80; ++step) {
      const Vector r = residuals(x);
      Vector g = Vector::Zero(dim);
      Matrix H = Matrix::Zero(dim, dim);
      const Vector rinv = r.cwiseInverse();
      const Vector rinv2 = rinv.cwiseProduct(rinv);
      g.head(n) = -cone.A.transpose() * rinv;
      g[n] = -t + rinv.sum();
      for (int i = 0; i < n; ++i) {
        const double dl = x[i] - lo;
        const double dh = hi - x[i];
        g[i] += -1.0 / dl + 1.0 / dh;
        H(i, i) += 1.0 / (dl * dl) + 1.0 / (dh * dh);
      }
      const Matrix B = rinv.asDiagonal() * cone.A;
      H.topLeftCorner(n, n).noalias() += B.transpose() * B;
      H.topRightCorner(n, 1).noalias() = -cone.A.transpose() * rinv2;
      H.bottomLeftCorner(1, n) = H.topRightCorner(n, 1).transpose();
      H(n, n) = rinv2.sum();
      H.diagonal().array() += 1e-12;

      Eigen::LDLT<Matrix> ldlt(H);
      Vector d = ldlt.solve(-g);
      const double dec = -g.dot(d);
      if (!(dec > 1e-12 * (1.0 + t))) break;

      double alpha = 1.0;
      const Vector dr = Vector(cone.A * d.head(n)) -
                        Vector::Constant(m, d[n]);
      for (int j = 0; j < m; ++j)
        if (dr[j] < 0.0) alpha = std::min(alpha, 0.99 * (-r[j] / dr[j]));
      for (int i = 0; i < n; ++i) {
        if (d[i] < 0.0) alpha = std::min(alpha, 0.99 * (lo - x[i]) / d[i]);
        if (d[i] > 0.0) alpha = std::min(alpha, 0.99 * (hi - x[i]) / d[i]);
      }
      x += alpha * d;
    }
    lam = x.head(n);
    if (margin(lam) > 1e-9) return lam;
  }
  throw InfeasibleConeError("cone: no strictly feasible point found");
}

PenaltyResult cone_penalty_numeric(const Vector& beta, const ConeSpec& cone,
                                   const ConeSolveConfig& cfg) {
  check_vector(beta, "beta");
  check_matrix(cone.A, "cone.A");
  require(cone.cols() == static_cast<int>(beta.size()),
          "cone: dimension mismatch");

  const ConeStructure structure = analyze(cone.A);
  const Vector beta2 = beta.cwiseProduct(beta);
  const double floor0 =
      cfg.floor_continuation ? cfg.floor_start : cfg.floor_min;
  Vector lam = prepare_start(cone, beta, floor0);
  lam = barrier_continuation(cone.A, structure, beta2, std::move(lam), cfg,
                             cfg.barrier_t0, floor0);

  PenaltyResult res;
  res.omega = gamma_unchecked(beta2, lam);
  res.lambda = std::move(lam);
  return res;
}

ConeEvaluator::ConeEvaluator(ConeSpec cone, ConeSolveConfig cfg)
    : cone_(std::move(cone)), cfg_(std::move(cfg)) {
  check_matrix(cone_.A, "cone.A");
}

PenaltyResult ConeEvaluator::minimize(const Vector& phi) {
  require(cone_.cols() == static_cast<int>(phi.size()),
          "cone: dimension mismatch");
  require(phi.minCoeff() > 0.0, "cone evaluator: phi must be positive");

  const ConeStructure structure = analyze(cone_.A);
  const Vector beta2 = phi.cwiseProduct(phi);
  Vector lam;
  double t0;
  if (has_warm_) {
    lam = warm_;
    t0 = std::min(cfg_.barrier_t0, 1e-3);  // short re-centering path
  } else {
    lam = prepare_start(cone_, phi, cfg_.floor_min);
    t0 = cfg_.barrier_t0;
  }
  ConeSolveConfig cfg = cfg_;
  cfg.floor_continuation = false;  // phi > 0 keeps the minimizer interior
  lam = barrier_continuation(cone_.A, structure, beta2, std::move(lam), cfg,
                             t0, cfg.floor_min);
  warm_ = lam;
  has_warm_ = true;

  PenaltyResult res;
  res.omega = gamma_unchecked(beta2, lam);
  res.lambda = std::move(lam);
  return res;
}

// --------------------------------------------------------------------------
// Dual norm: maximize sum lambda_i beta_i^2 over the sum-one slice of the
// cone, by a barrier method with the equality handled in the KKT system.

double dual_norm(const Vector& beta, const ConeSpec& cone,
                 const ConeSolveConfig& cfg) {
  check_vector(beta, "beta");
  check_matrix(cone.A, "cone.A");
  const int n = static_cast<int>(beta.size());
  const int m = cone.rows();
  require(cone.cols() == n, "dual_norm: dimension mismatch");
  if (m == 0) return dual_norm_orthant(beta);

  const double cmax = beta.cwiseProduct(beta).maxCoeff();
  if (cmax == 0.0) return 0.0;
  const Vector c = beta.cwiseProduct(beta) / cmax;

  Vector lam = cone_strictly_feasible_point(cone);
  lam /= lam.sum();

  int budget = cfg.max_newton;
  const double target_gap = 1e-9;
  double tmax = static_cast<double>(m + n) / target_gap;
  auto fvalue = [&](const Vector& l, const Vector& r, double t) {
    return -t * c.dot(l) - r.array().log().sum() - l.array().log().sum();
  };

  for (double t = 1.0; t <= tmax; t *= 10.0) {
    for (int step = 0; step < 120; ++step) {
      if (--budget <= 0)
        throw NonConvergenceError("dual_norm: Newton budget exhausted");
      const Vector r = cone.A * lam;
      const double fval = fvalue(lam, r, t);
      const Vector rinv = r.cwiseInverse();
      Vector g = -t * c - cone.A.transpose() * rinv -
                 lam.cwiseInverse();
      Matrix H = Matrix::Zero(n, n);
      const Matrix B = rinv.asDiagonal() * cone.A;
      H.noalias() = B.transpose() * B;
      for (int i = 0; i < n; ++i) H(i, i) += 1.0 / (lam[i] * lam[i]);

      Matrix KKT = Matrix::Zero(n + 1, n + 1);
      KKT.topLeftCorner(n, n) = H;
      KKT.topRightCorner(n, 1).setOnes();
      KKT.bottomLeftCorner(1, n).setOnes();
      Vector rhs(n + 1);
      rhs.head(n) = -g;
      rhs[n] = 0.0;
      Vector sol = Eigen::PartialPivLU<Matrix>(KKT).solve(rhs);
      const Vector d = sol.head(n);

      const double dec = -g.dot(d);
      if (!(dec * 0.5 > 1e-10 * t)) break;

      double alpha = 1.0;
      const Vector Ad = cone.A * d;
      for (int j = 0; j < m; ++j)
        if (Ad[j] < 0.0) alpha = std::min(alpha, 0.99 * (-r[j] / Ad[j]));
      for (int i = 0; i < n; ++i)
        if (d[i] < 0.0) alpha = std::min(alpha, 0.99 * (-lam[i] / d[i]));
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        Vector cand = lam + alpha * d;
        const double fc = fvalue(cand, Vector(r + alpha * Ad), t);
        if (std::isfinite(fc) && fc <= fval - 0.25 * alpha * dec) {
          lam = std::move(cand);
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
    }
  }
  return std::sqrt(cmax * std::max(0.0, c.dot(lam)));
}

}  // namespace structpen
