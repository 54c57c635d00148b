#pragma once

/// \file
/// Renorming constructions for a space with a basis, evaluated on finite
/// truncations:
///
///  * the seminorm sup_k (1 + eps_k) max_{n <= n_k} |<P_n x, w_k>| built from a
///    precisely norming sequence (w_k);
///  * finite norming sets W_j for the sections span{e_1..e_j}, j <= 3;
///  * rho(x) = sup_n (1 + eta_n) max_{j <= n} max_{w in W_j} |<P_j x, w>|;
///  * sample-based checks of the precisely norming property.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "orlicz/error.hpp"
#include "orlicz/log_real.hpp"
#include "orlicz/sequence_space.hpp"

namespace orlicz {

/// A functional on span{e_1..e_level}: w(x) = scale * sum_i coefficients[i] x_{i+1}.
struct SectionFunctional {
  std::size_t level = 0;
  std::vector<double> coefficients;
  double scale = 1.0;

  SectionFunctional() = default;
  SectionFunctional(std::vector<double> coeffs, double s = 1.0)
      : level(coeffs.size()), coefficients(std::move(coeffs)), scale(s) {}

  void validate() const {
    if (coefficients.size() != level) throw DomainError("SectionFunctional: coefficient count must equal level");
  }

  /// <P_n x, w>; only coordinates up to min(n, level) contribute.
  LogReal pair(const FiniteVector& x, std::size_t n) const {
    const std::size_t top = std::min(n, level);
    LogReal sum;
    for (const auto& [i, a] : x) {
      if (i > top) break;
      const double c = coefficients[i - 1] * scale;
      if (c != 0.0) sum += LogReal::from_double(c) * a;
    }
    return sum;
  }

  LogReal operator()(const FiniteVector& x) const { return pair(x, level); }

  double apply(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(x.size(), level); ++i) s += coefficients[i] * x[i];
    return s * scale;
  }
};

struct FonfSeminormSpec {
  std::vector<SectionFunctional> functionals;  // w_k
  std::vector<std::size_t> cutoffs;            // n_k
  std::vector<double> eps;                     // eps_k
  std::vector<double> delta;                   // delta_k

  /// Same lengths, eps and delta in (0, 1), (1 + eps_k)(1 - 2 delta_k) > 1.
  void validate() const {
    const std::size_t n = functionals.size();
    if (n == 0) throw DomainError("FonfSeminormSpec: no functionals");
    if (cutoffs.size() != n || eps.size() != n || delta.size() != n) {
      throw DomainError("FonfSeminormSpec: functionals, cutoffs, eps and delta must have equal length");
    }
    for (std::size_t k = 0; k < n; ++k) {
      functionals[k].validate();
      if (cutoffs[k] < 1) throw DomainError("FonfSeminormSpec: cutoffs must be >= 1");
      if (!(eps[k] > 0 && eps[k] < 1 && delta[k] > 0 && delta[k] < 1)) {
        throw DomainError("FonfSeminormSpec: eps_k and delta_k must lie in (0, 1)");
      }
      if (!((1.0 + eps[k]) * (1.0 - 2.0 * delta[k]) > 1.0)) {
        throw DomainError("FonfSeminormSpec: (1 + eps_k)(1 - 2 delta_k) > 1 fails at k = " + std::to_string(k + 1));
      }
    }
  }
};

inline LogReal fonf_seminorm_eval(const FonfSeminormSpec& spec, const FiniteVector& x) {
  spec.validate();
  LogReal best;
  for (std::size_t k = 0; k < spec.functionals.size(); ++k) {
    const LogReal factor = LogReal::from_double(1.0 + spec.eps[k]);
    for (std::size_t n = 1; n <= spec.cutoffs[k]; ++n) {
      best = max(best, factor * spec.functionals[k].pair(x, n).abs());
    }
  }
  return best;
}

/// Norm evaluator on a j-dimensional section, coordinates x_1..x_j.
using SectionNorm = std::function<double(std::span<const double>)>;

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Unit directions covering the sphere of R^n, n <= 3, at resolution `res`:
/// n = 1: {+1, -1}; n = 2: 4*res equally spaced angles; n = 3: the six faces
/// of the cube with a (res+1)^2 grid each, projected radially.
inline std::vector<std::vector<double>> direction_net(std::size_t n, std::size_t res) {
  std::vector<std::vector<double>> dirs;
  if (n == 1) return {{1.0}, {-1.0}};
  if (n == 2) {
    const std::size_t count = 4 * res;
    for (std::size_t i = 0; i < count; ++i) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
      std::vector<double> d = {std::cos(th), std::sin(th)};
      for (auto& c : d) {
        if (std::fabs(c) < 1e-15) c = 0.0;
      }
      dirs.push_back(std::move(d));
    }
    return dirs;
  }
  for (std::size_t axis = 0; axis < 3; ++axis) {
    for (double face : {1.0, -1.0}) {
      for (std::size_t i = 0; i <= res; ++i) {
        for (std::size_t j = 0; j <= res; ++j) {
          // tan spacing evens out the angular gaps on each face
          const double u = std::tan(std::numbers::pi / 4 * (-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(res)));
          const double v = std::tan(std::numbers::pi / 4 * (-1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(res)));
          std::vector<double> d(3);
          d[axis] = face;
          d[(axis + 1) % 3] = u;
          d[(axis + 2) % 3] = v;
          const double len = std::sqrt(dot(d, d));
          for (auto& c : d) c /= len;
          dirs.push_back(std::move(d));
        }
      }
    }
  }
  return dirs;
}

inline bool nearly_equal(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::fabs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

inline double cross(const std::vector<double>& o, const std::vector<double>& a, const std::vector<double>& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

/// Vertices of the convex hull of planar points (monotone chain), collinear
/// points dropped.
inline std::vector<std::vector<double>> hull_2d(std::vector<std::vector<double>> pts, double tol) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(), [tol](const auto& a, const auto& b) { return nearly_equal(a, b, tol); }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<std::vector<double>> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= tol) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= tol) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  // flat lexicographic extremes survive the chain
  for (bool changed = true; changed && h.size() > 3;) {
    changed = false;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const auto& prev = h[(i + h.size() - 1) % h.size()];
      const auto& next = h[(i + 1) % h.size()];
      if (cross(prev, h[i], next) <= tol) {
        h.erase(h.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return h;
}

}  // namespace detail

/// One supporting functional per direction: the central-difference gradient
/// of the norm (step 1e-5 relative), rescaled so that its largest ratio
/// w(d)/||d|| over `check_dirs` is at most 1.
inline std::vector<SectionFunctional> norming_functionals_from_directions(
    const SectionNorm& norm, const std::vector<std::vector<double>>& dirs,
    const std::vector<std::vector<double>>& check_dirs) {
  if (dirs.empty()) throw DomainError("norming family: empty direction net");
  const std::size_t n = dirs.front().size();
  std::vector<double> check_norms;
  check_norms.reserve(check_dirs.size());
  for (const auto& d : check_dirs) check_norms.push_back(norm(d));
  const double largest = check_norms.empty() ? 0.0 : *std::max_element(check_norms.begin(), check_norms.end());
  for (const double v : check_norms) {
    if (!(v > 1e-12 * largest) || !std::isfinite(v)) {
      throw DomainError("norming family: oracle is not a norm (vanishes on a nonzero point)");
    }
  }
  std::vector<std::vector<double>> grads;
  for (const auto& u : dirs) {
    const double nu = norm(u);
    if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("norming family: oracle is not a norm (vanishes on a nonzero point)");
    const double h = 1e-5 * std::sqrt(detail::dot(u, u));
    std::vector<double> g(n);
    std::vector<double> p = u;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = u[i] + h;
      const double up = norm(p);
      p[i] = u[i] - h;
      const double dn = norm(p);
      p[i] = u[i];
      g[i] = (up - dn) / (2.0 * h);
    }
    double worst = 0.0;
    for (std::size_t c = 0; c < check_dirs.size(); ++c) {
      worst = std::max(worst, detail::dot(g, check_dirs[c]) / check_norms[c]);
    }
    worst = std::max(worst, detail::dot(g, u) / nu);
    if (worst > 1.0) {
      for (auto& c : g) c /= worst;
    }
    grads.push_back(std::move(g));
  }
  if (n == 2) {
    // Keep only extreme points of the symmetric hull of the gradients.
    std::vector<std::vector<double>> sym = grads;
    for (const auto& g : grads) sym.push_back({-g[0], -g[1]});
    grads = detail::hull_2d(std::move(sym), 1e-9);
  } else {
    std::sort(grads.begin(), grads.end());
    grads.erase(std::unique(grads.begin(), grads.end(),
                            [](const auto& a, const auto& b) { return detail::nearly_equal(a, b, 1e-12); }),
                grads.end());
  }
  std::vector<SectionFunctional> out;
  out.reserve(grads.size());
  for (auto& g : grads) out.emplace_back(std::move(g));
  return out;
}

/// Worst ratio max_W |w(d)| / ||d|| over the directions (minimum) and the
/// largest ratio (maximum).
struct SandwichStats {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

inline SandwichStats sandwich_stats(const std::vector<SectionFunctional>& W, const SectionNorm& norm,
                                    const std::vector<std::vector<double>>& points) {
  SandwichStats s{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& p : points) {
    const double np = norm(p);
    double best = 0.0;
    for (const auto& w : W) best = std::max(best, std::fabs(w.apply(p)));
    s.min_ratio = std::min(s.min_ratio, best / np);
    s.max_ratio = std::max(s.max_ratio, best / np);
  }
  return s;
}

/// Finite W with (1+eps)^{-1} ||x|| <= max_W |w(x)| <= ||x|| on the n-dimensional
/// section, n <= 3.
///
/// The direction net is refined until the lower ratio on a net four times
/// finer is at least (1 + eps/2)^{-1}, leaving margin for points between
/// check directions.
inline std::vector<SectionFunctional> build_norming_family(const SectionNorm& norm, std::size_t n, double eps) {
  if (n < 1) throw DomainError("build_norming_family: dimension must be >= 1");
  if (n > 3) throw DomainError("build_norming_family: dimension " + std::to_string(n) + " exceeds 3");
  if (!(eps > 0.0)) throw DomainError("build_norming_family: eps must be positive");
  const double target = 1.0 / (1.0 + eps / 2.0);
  for (std::size_t res = 2; res <= 512; res *= 2) {
    const auto dirs = detail::direction_net(n, res);
    const auto check = detail::direction_net(n, 4 * res);
    auto W = norming_functionals_from_directions(norm, dirs, check);
    if (n == 1 || sandwich_stats(W, norm, check).min_ratio >= target) return W;
  }
  throw SearchExhausted("build_norming_family: direction net refinement cap reached");
}

/// W_j for j = 1..J with eps_j and eta_j, 1 > eta_j > eps_j > 0.
struct NormingLevel {
  std::vector<SectionFunctional> functionals;
  double eps = 0.0;
  double eta = 0.0;
};

class NormingFamily {
 public:
  explicit NormingFamily(std::vector<NormingLevel> levels) : levels_(std::move(levels)) {
    for (std::size_t j = 0; j < levels_.size(); ++j) {
      const auto& L = levels_[j];
      if (!(L.eta < 1.0 && L.eta > L.eps && L.eps > 0.0)) {
        throw DomainError("NormingFamily: need 1 > eta_j > eps_j > 0 at level " + std::to_string(j + 1));
      }
      if (L.functionals.empty()) throw DomainError("NormingFamily: empty W at level " + std::to_string(j + 1));
      for (const auto& w : L.functionals) {
        if (w.level != j + 1) throw DomainError("NormingFamily: functional level mismatch at level " + std::to_string(j + 1));
      }
    }
  }

  /// Builds W_j for j = 1..J from the section norms. Each level is checked on
  /// `validation_samples` uniformly random points of [-1,1]^j; the upper bound
  /// is allowed a relative slack of 1e-9.
  static NormingFamily build(const std::function<SectionNorm(std::size_t)>& section_norm, std::size_t J,
                             const std::function<double(std::size_t)>& eps_of,
                             const std::function<double(std::size_t)>& eta_of, std::uint64_t seed = 1,
                             std::size_t validation_samples = 256) {
    std::vector<NormingLevel> levels;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (std::size_t j = 1; j <= J; ++j) {
      const SectionNorm norm = section_norm(j);
      NormingLevel L{build_norming_family(norm, j, eps_of(j)), eps_of(j), eta_of(j)};
      std::vector<std::vector<double>> samples;
      for (std::size_t s = 0; s < validation_samples; ++s) {
        std::vector<double> p(j);
        for (auto& c : p) c = unif(rng);
        if (std::all_of(p.begin(), p.end(), [](double c) { return c == 0.0; })) continue;
        samples.push_back(std::move(p));
      }
      const SandwichStats st = sandwich_stats(L.functionals, norm, samples);
      if (st.min_ratio < 1.0 / (1.0 + L.eps) || st.max_ratio > 1.0 + 1e-9) {
        throw Error("NormingFamily: level " + std::to_string(j) + " fails its sandwich on validation samples");
      }
      levels.push_back(std::move(L));
    }
    return NormingFamily(std::move(levels));
  }

  std::size_t depth() const noexcept { return levels_.size(); }
  const NormingLevel& level(std::size_t j) const { return levels_.at(j - 1); }

 private:
  std::vector<NormingLevel> levels_;
};

/// rho(x) = max_{n <= J} (1 + eta_n) max_{j <= n} max_{w in W_j} |<P_j x, w>|.
inline LogReal rho_eval(const NormingFamily& family, const FiniteVector& x) {
  if (x.max_index() > family.depth()) {
    throw DomainError("rho_eval: support index " + std::to_string(x.max_index()) + " exceeds family depth " +
                      std::to_string(family.depth()));
  }
  LogReal best;
  LogReal inner;  // running max over j <= n
  for (std::size_t n = 1; n <= family.depth(); ++n) {
    for (const auto& w : family.level(n).functionals) inner = max(inner, w.pair(x, n).abs());
    best = max(best, LogReal::from_double(1.0 + family.level(n).eta) * inner);
  }
  return best;
}

struct PreciseNormingReport {
  std::vector<bool> attained;
  std::vector<double> gaps;  // (||x|| - max_W |w(x)|) / ||x||
  double worst_gap = 0.0;
  bool all_attained() const {
    return std::all_of(attained.begin(), attained.end(), [](bool b) { return b; });
  }
};

/// Per-sample check that max_W |w(x)| reaches ||x|| within relative tol.rel.
/// A finite-sample certificate only.
inline PreciseNormingReport check_precisely_norming(const std::vector<SectionFunctional>& W, const SectionNorm& norm,
                                                    const std::vector<std::vector<double>>& samples,
                                                    const Tolerance& tol) {
  if (W.empty()) throw DomainError("check_precisely_norming: empty functional set");
  PreciseNormingReport r;
  for (const auto& x : samples) {
    const double nx = norm(x);
    double best = 0.0;
    for (const auto& w : W) best = std::max(best, std::fabs(w.apply(x)));
    const double gap = nx > 0.0 ? (nx - best) / nx : 0.0;
    r.gaps.push_back(gap);
    r.attained.push_back(std::fabs(gap) <= tol.rel);
    r.worst_gap = std::max(r.worst_gap, gap);
  }
  return r;
}

}  // namespace orlicz
