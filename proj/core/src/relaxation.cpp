#include "mineig/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "mineig/error.hpp"

namespace mineig {
namespace {

struct ActiveVertex {
  ElementSet base;  // reduced indices
  double weight;
};

// Function handle on the reduced face: X(y) = A_S + sum_j y_j u_j u_j^T.
class FaceProblem {
 public:
  FaceProblem(const Instance& instance, const MatroidMinor& face, const Objective& objective,
              const NumericPolicy& policy)
      : instance_(instance),
        face_(face),
        objective_(objective),
        policy_(policy),
        fixed_(instance.vectors.gram(face.contracted())) {
    for (Element e : face.kept()) {
      const auto v = instance.vectors[e];
      u_.emplace_back(v.begin(), v.end());
    }
  }

  std::size_t size() const { return u_.size(); }
  const std::vector<Vector>& vectors() const { return u_; }
  const SymMatrix& fixed() const { return fixed_; }

  // Built from the full point so it matches the reported X* bit for bit.
  SymMatrix matrix(std::span<const double> y) const {
    return instance_.vectors.weighted_gram(face_.extend(y));
  }
  SymMatrix direction_matrix(std::span<const double> dir) const {
    SymMatrix m(fixed_.dim());
    for (std::size_t j = 0; j < u_.size(); ++j)
      if (dir[j] != 0.0) m.add_outer(u_[j], dir[j]);
    return m;
  }
  Objective::Evaluation eval(const SymMatrix& x, double beta) const {
    return objective_.surrogate(x, beta, policy_);
  }
  double value(const SymMatrix& x) const { return objective_.value(x, policy_); }
  Vector weights(const SymMatrix& gradient) const {
    Vector w(u_.size());
    for (std::size_t j = 0; j < u_.size(); ++j) w[j] = gradient.bilinear(u_[j], u_[j]);
    return w;
  }

 private:
  const Instance& instance_;
  const MatroidMinor& face_;
  const Objective& objective_;
  const NumericPolicy& policy_;
  SymMatrix fixed_;
  std::vector<Vector> u_;
};

double linear(std::span<const double> w, const ElementSet& base) {
  double s = 0.0;
  for (Element j : base) s += w[j];
  return s;
}

// argmax of a concave function on [0, hi], also checking the endpoint.
template <class Fn>
double golden_section(Fn&& fn, double hi, int iterations) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = 0.0;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  for (int it = 0; it < iterations; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = fn(d);
    }
  }
  const double mid = 0.5 * (a + b);
  return fn(hi) >= fn(mid) ? hi : mid;
}


// Restricted problem of the fully corrective solver for lambda-min:
//   max_{lambda in simplex}  g_mu(sum_j lambda_j M_j) + mu_b sum_j log lambda_j
// with g_mu the log-barrier smoothing. Partial maximisation over t keeps
// g_mu / mu self-concordant, so damped Newton with path-following in mu is
// robust however small mu gets.
class BarrierMaster {
 public:
  BarrierMaster(std::size_t dim, const NumericPolicy& policy) : dim_(dim), policy_(policy) {}

  std::size_t size() const { return mats_.size(); }
  const std::vector<ElementSet>& bases() const { return bases_; }
  const Vector& weights() const { return lambda_; }

  bool contains(const ElementSet& base) const {
    return std::find(bases_.begin(), bases_.end(), base) != bases_.end();
  }

  // New vertex enters with weight 1/k.
  void add(ElementSet base, SymMatrix mat) {
    const double theta = 1.0 / static_cast<double>(mats_.size() + 1);
    for (double& l : lambda_) l *= 1.0 - theta;
    lambda_.push_back(mats_.empty() ? 1.0 : theta);
    bases_.push_back(std::move(base));
    mats_.push_back(std::move(mat));
  }

  // Follows the central path from mu_from down to mu; the restricted
  // Frank-Wolfe gap at exit is about k * mu_b <= restricted_gap.
  void solve(double mu_from, double mu, double restricted_gap) {
    const std::size_t k = mats_.size();
    if (k < 2) return;
    const double ratio = std::min(1.0, restricted_gap / (static_cast<double>(k) * mu));
    double mu_c = std::max(mu_from, mu);
    while (true) {
      newton(mu_c, ratio * mu_c);
      if (mu_c <= mu) break;
      mu_c = std::max(mu, 0.1 * mu_c);
    }
  }

 private:
  struct Eval {
    double phi;
    Vector grad;
    SymMatrix hess{1};
  };

  SymMatrix combination(std::span<const double> lambda) const {
    SymMatrix x(dim_);
    for (std::size_t j = 0; j < mats_.size(); ++j) x.add_scaled(mats_[j], lambda[j]);
    return x;
  }

  std::optional<Eval> evaluate(std::span<const double> lambda, double mu, double mu_b,
                               bool with_hessian) const {
    const std::size_t k = mats_.size();
    for (double l : lambda)
      if (!(l > 0.0)) return std::nullopt;
    const EigenDecomp eig = eigen_decompose(combination(lambda), policy_);
    const double lo = eig.min();
    Vector shifts(dim_);
    for (std::size_t i = 0; i < dim_; ++i) shifts[i] = eig.values[i] - lo;
    const double s = barrier_slack(shifts, mu);
    Vector w(dim_);
    double w2 = 0.0;
    const double dmu = static_cast<double>(dim_) * mu;
    Eval ev;
    ev.phi = lo - s + dmu;
    for (std::size_t i = 0; i < dim_; ++i) {
      w[i] = 1.0 / (shifts[i] + s);
      w2 += w[i] * w[i];
      ev.phi += mu * std::log((shifts[i] + s) / dmu);
    }
    for (double l : lambda) ev.phi += mu_b * std::log(l);

    // Each vertex matrix in the eigenbasis of X.
    std::vector<Vector> rotated(k, Vector(dim_ * dim_));
    std::vector<Vector> q(dim_);
    for (std::size_t i = 0; i < dim_; ++i) q[i].assign(eig.vector(i).begin(), eig.vector(i).end());
    Vector diag_w2(k);
    ev.grad.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t b = 0; b < dim_; ++b) {
        const Vector mq = mats_[j].apply(q[b]);
        for (std::size_t a = 0; a <= b; ++a) {
          const double v = dot(q[a], mq);
          rotated[j][a * dim_ + b] = v;
          rotated[j][b * dim_ + a] = v;
        }
      }
      for (std::size_t i = 0; i < dim_; ++i) {
        const double m_ii = rotated[j][i * dim_ + i];
        ev.grad[j] += mu * w[i] * m_ii;
        diag_w2[j] += w[i] * w[i] * m_ii;
      }
      ev.grad[j] += mu_b / lambda[j];
    }
    if (!with_hessian) return ev;
    ev.hess = SymMatrix(k);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        double h = 0.0;
        for (std::size_t i = 0; i < dim_; ++i)
          for (std::size_t l = 0; l < dim_; ++l)
            h += w[i] * w[l] * rotated[a][i * dim_ + l] * rotated[b][i * dim_ + l];
        h = -mu * h + mu * diag_w2[a] * diag_w2[b] / w2;
        if (a == b) h -= mu_b / (lambda[a] * lambda[a]);
        ev.hess.set(a, b, h);
      }
    }
    return ev;
  }

  void newton(double mu, double mu_b) {
    const std::size_t k = mats_.size();
    const double inv_k = 1.0 / static_cast<double>(k);
    for (int it = 0; it < 100; ++it) {
      const std::optional<Eval> ev = evaluate(lambda_, mu, mu_b, true);
      if (!ev) return;
      // Project onto the tangent space {sum d = 0}.
      Vector g = ev->grad;
      const double gmean = std::accumulate(g.begin(), g.end(), 0.0) * inv_k;
      for (double& gi : g) gi -= gmean;
      SymMatrix hp(k);
      Vector row_mean(k, 0.0);
      double all_mean = 0.0;
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) row_mean[a] += ev->hess(a, b);
        row_mean[a] *= inv_k;
        all_mean += row_mean[a];
      }
      all_mean *= inv_k;
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b <= a; ++b)
          hp.set(a, b, ev->hess(a, b) - row_mean[a] - row_mean[b] + all_mean);
      const EigenDecomp he = eigen_decompose(hp, policy_);
      double hmax = 0.0;
      for (double h : he.values) hmax = std::max(hmax, std::abs(h));
      Vector step(k, 0.0);
      double decrement = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double h = he.values[i];
        if (!(h < -1e-14 * hmax)) continue;
        const std::span<const double> qi = he.vector(i);
        const double c = dot(qi, g);
        decrement += c * c / -h;
        for (std::size_t j = 0; j < k; ++j) step[j] += c / -h * qi[j];
      }
      const double smean = std::accumulate(step.begin(), step.end(), 0.0) * inv_k;
      for (double& sj : step) sj -= smean;
      if (decrement <= 1e-10 * mu_b) return;

      double alpha = 1.0;
      for (std::size_t j = 0; j < k; ++j)
        if (step[j] < 0.0) alpha = std::min(alpha, -0.99 * lambda_[j] / step[j]);
      const double slope = dot(ev->grad, step);
      Vector trial(k);
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        for (std::size_t j = 0; j < k; ++j) trial[j] = lambda_[j] + alpha * step[j];
        const std::optional<Eval> next = evaluate(trial, mu, mu_b, false);
        if (next && next->phi >= ev->phi + 1e-4 * alpha * slope) {
          moved = true;
          break;
        }
      }
      if (!moved) return;
      const double total = std::accumulate(trial.begin(), trial.end(), 0.0);
      for (std::size_t j = 0; j < k; ++j) lambda_[j] = trial[j] / total;
    }
  }

  std::size_t dim_;
  const NumericPolicy& policy_;
  std::vector<ElementSet> bases_;
  std::vector<SymMatrix> mats_;
  Vector lambda_;
};

// Away-step Frank-Wolfe with exact line search, for objectives used as is.
void away_step(const FaceProblem& problem, const Matroid& reduced, const ElementSet& start,
               const RelaxationOptions& options, const NumericPolicy& policy, Vector& y,
               std::size_t& iteration, double& gap, bool& converged) {
  const std::size_t m = problem.size();
  std::vector<ActiveVertex> active{{start, 1.0}};
  y = indicator(m, start);

  {
    const double beta = 0.0;
    while (true) {
      const SymMatrix x = problem.matrix(y);
      const Objective::Evaluation ev = problem.eval(x, beta);
      const Vector w = problem.weights(ev.gradient);
      const ElementSet fw_vertex = greedy_max_weight_base(reduced, w);
      const double wy = dot(w, y);
      gap = m == 0 ? 0.0 : std::max(linear(w, fw_vertex) - wy, 0.0);
      if (gap <= options.tolerance * std::max(1.0, std::abs(ev.value))) {
        converged = true;
        break;
      }
      if (iteration >= options.max_iterations) break;

      std::size_t away = 0;
      for (std::size_t k = 1; k < active.size(); ++k)
        if (linear(w, active[k].base) < linear(w, active[away].base)) away = k;
      const double away_gap = wy - linear(w, active[away].base);
      const bool use_away = active.size() > 1 && away_gap > gap;

      Vector dir(m);
      double gamma_max = 1.0;
      if (use_away) {
        const Vector va = indicator(m, active[away].base);
        for (std::size_t j = 0; j < m; ++j) dir[j] = y[j] - va[j];
        const double alpha = active[away].weight;
        gamma_max = alpha / (1.0 - alpha);
      } else {
        const Vector vs = indicator(m, fw_vertex);
        for (std::size_t j = 0; j < m; ++j) dir[j] = vs[j] - y[j];
      }
      const SymMatrix dmat = problem.direction_matrix(dir);
      const double gamma = golden_section(
          [&](double g) {
            SymMatrix xt = x;
            xt.add_scaled(dmat, g);
            return problem.value(xt);
          },
          gamma_max, policy.golden_section_iterations);

      if (use_away) {
        for (auto& v : active) v.weight *= 1.0 + gamma;
        active[away].weight -= gamma;
        if (gamma >= gamma_max || active[away].weight <= 1e-15) {
          active.erase(active.begin() + static_cast<std::ptrdiff_t>(away));
        }
      } else {
        for (auto& v : active) v.weight *= 1.0 - gamma;
        auto it = std::find_if(active.begin(), active.end(),
                               [&](const ActiveVertex& v) { return v.base == fw_vertex; });
        if (gamma >= 1.0) {
          active.assign(1, {fw_vertex, 1.0});
        } else if (it != active.end()) {
          it->weight += gamma;
        } else {
          active.push_back({fw_vertex, gamma});
        }
      }
      std::erase_if(active, [](const ActiveVertex& v) { return v.weight <= 0.0; });
      double total = 0.0;
      for (const auto& v : active) total += v.weight;
      std::fill(y.begin(), y.end(), 0.0);
      for (auto& v : active) {
        v.weight /= total;
        for (Element j : v.base) y[j] += v.weight;
      }
      for (double& yj : y) yj = std::clamp(yj, 0.0, 1.0);

      ++iteration;
      if (options.observer) {
        options.observer({iteration, beta, ev.value, gap, gamma, use_away});
      }
    }
  }

}

// Fully corrective Frank-Wolfe for lambda-min: every new greedy vertex is
// followed by an exact re-optimisation over all vertices collected so far.
void fully_corrective(const FaceProblem& problem, const Matroid& reduced, const ElementSet& start,
                      const RelaxationOptions& options, const NumericPolicy& policy,
                      std::size_t dim, Vector& y, double& beta_used, std::size_t& iteration,
                      double& gap, bool& converged) {
  const std::size_t m = problem.size();
  BarrierMaster master(dim, policy);
  master.add(start, problem.matrix(indicator(m, start)));
  const auto current_point = [&] {
    Vector point(m, 0.0);
    for (std::size_t j = 0; j < master.size(); ++j)
      for (Element e : master.bases()[j]) point[e] += master.weights()[j];
    for (double& p : point) p = std::clamp(p, 0.0, 1.0);
    return point;
  };

  const std::vector<double> betas = smoothing_schedule(dim, options.tolerance, policy);
  double previous_mu = 0.0;
  double scale = 1.0;
  for (double beta : betas) {
    const double mu = 1.0 / beta;
    beta_used = beta;
    converged = false;
    master.solve(previous_mu > 0.0 ? previous_mu : 1e3 * mu, mu, 1e-3 * options.tolerance * scale);
    previous_mu = mu;
    int stalls = 0;
    while (true) {
      y = current_point();
      const SymMatrix x = problem.matrix(y);
      const Objective::Evaluation ev = problem.eval(x, beta);
      scale = std::max(1.0, std::abs(ev.value));
      const Vector w = problem.weights(ev.gradient);
      const ElementSet vertex = greedy_max_weight_base(reduced, w);
      gap = m == 0 ? 0.0 : std::max(linear(w, vertex) - dot(w, y), 0.0);
      if (gap <= options.tolerance * scale) {
        converged = true;
        break;
      }
      if (iteration >= options.max_iterations) break;
      const double target = 1e-3 * options.tolerance * scale;
      if (master.contains(vertex)) {
        // The restricted problem was not solved tightly enough.
        if (++stalls > 3) break;
        master.solve(10.0 * mu, mu, target * std::pow(1e-3, stalls));
      } else {
        stalls = 0;
        master.add(vertex, problem.matrix(indicator(m, vertex)));
        master.solve(1e3 * mu, mu, target);
      }
      ++iteration;
      if (options.observer) {
        options.observer({iteration, beta, ev.value, gap, master.weights().back(), false});
      }
    }
  }
}

}  // namespace

MatroidMinor face_matroid(const Instance& instance, const SeedResult& seed) {
  return MatroidMinor(instance.matroid, seed.seed, seed.long_set);
}

std::vector<double> smoothing_schedule(std::size_t d, double tolerance,
                                       const NumericPolicy& policy) {
  const double scale = std::max(std::log(static_cast<double>(d)), 1.0) / tolerance;
  std::vector<double> betas;
  for (double s : policy.smoothing_schedule) betas.push_back(s * scale);
  return betas;
}

ElementSet max_volume_base(const Matroid& m, const std::vector<Vector>& vectors,
                           const SymMatrix& base_matrix, const NumericPolicy& policy) {
  const std::size_t target = m.full_rank();
  ElementSet chosen;
  SymMatrix a = base_matrix;
  while (chosen.size() < target) {
    const PseudoInverse inv(a, policy);
    double best_residual = -1.0;
    double best_leverage = -1.0;
    std::optional<Element> pick;
    for (Element j = 0; j < m.ground_size(); ++j) {
      if (std::binary_search(chosen.begin(), chosen.end(), j)) continue;
      ElementSet trial = chosen;
      trial.insert(std::upper_bound(trial.begin(), trial.end(), j), j);
      if (!m.is_independent(trial)) continue;
      const double residual = inv.range_residual(vectors[j]) * norm(vectors[j]);
      const double lev = inv.bilinear(vectors[j], vectors[j]);
      const bool new_direction = residual > policy.range_residual_tolerance;
      const bool better = new_direction ? residual > best_residual
                                        : best_residual <= policy.range_residual_tolerance &&
                                              lev > best_leverage;
      if (!pick || better) {
        pick = j;
        best_residual = new_direction ? residual : std::max(best_residual, 0.0);
        best_leverage = lev;
      }
    }
    if (!pick) throw Error(ErrorCode::kInternalInvariantViolation, "greedy base construction stalled");
    chosen.insert(std::upper_bound(chosen.begin(), chosen.end(), *pick), *pick);
    a.add_outer(vectors[*pick]);
  }
  return chosen;
}

RelaxationSolution solve_cp(const Instance& instance, const SeedResult& seed,
                            const Objective& objective, const RelaxationOptions& options,
                            const NumericPolicy& policy) {
  const MatroidMinor face = face_matroid(instance, seed);
  return solve_cp(instance, face, objective, options, policy);
}

RelaxationSolution solve_cp(const Instance& instance, const MatroidMinor& face,
                            const Objective& objective, const RelaxationOptions& options,
                            const NumericPolicy& policy) {
  if (!face.feasible()) {
    throw Error(ErrorCode::kInfeasibleFace, "no base contains the seed while avoiding its long set");
  }
  if (!(options.tolerance > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be positive");

  const FaceProblem problem(instance, face, objective, policy);
  const Matroid& reduced = face.reduced();
  const ElementSet start = max_volume_base(reduced, problem.vectors(), problem.fixed(), policy);
  Vector y;
  RelaxationSolution sol;
  std::size_t iteration = 0;
  double gap = 0.0;
  bool converged = false;
  if (objective.smoothed()) {
    fully_corrective(problem, reduced, start, options, policy, instance.dim(), y, sol.beta,
                     iteration, gap, converged);
  } else {
    away_step(problem, reduced, start, options, policy, y, iteration, gap, converged);
  }

  sol.x_star = face.extend(y);
  sol.X_star = instance.vectors.weighted_gram(sol.x_star);
  sol.value = objective.value(sol.X_star, policy);
  sol.fw_gap = gap;
  sol.iterations = iteration;
  sol.converged = converged;
  return sol;
}

}  // namespace mineig
