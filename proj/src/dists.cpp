#include "alssm/dists.hpp"

#include <cmath>

#include "alssm/common.hpp"

namespace alssm {

void ALParams::validate() const {
  require(std::isfinite(mu), "ALParams: mu must be finite");
  require(p > 0.0 && p < 1.0, "ALParams: p must lie in (0,1)");
  require(sigma > 0.0 && std::isfinite(sigma), "ALParams: sigma must be > 0");
}

double al_logpdf(const ALParams& params, double v) {
  params.validate();
  double d = v - params.mu;
  return std::log(params.p * (1.0 - params.p) / params.sigma) -
         (std::abs(d) + (2.0 * params.p - 1.0) * d) / (2.0 * params.sigma);
}

double al_influence(const ALParams& params, double v) {
  params.validate();
  if (v == params.mu)
    throw NumericalError("al_influence: density kink at v == mu, pick a side");
  double sign = v > params.mu ? 1.0 : -1.0;
  return -(sign + 2.0 * params.p - 1.0) / (2.0 * params.sigma);
}

double al_draw(const ALParams& params, Rng& rng) {
  if (rng.uniform() < 1.0 - params.p)
    return params.mu + rng.exponential(params.p / params.sigma);
  return params.mu - rng.exponential((1.0 - params.p) / params.sigma);
}

std::vector<double> al_sample(const ALParams& params, Rng& rng, std::size_t n) {
  params.validate();
  require(n >= 1, "al_sample: n must be >= 1");
  std::vector<double> out(n);
  for (auto& v : out) v = al_draw(params, rng);
  return out;
}

std::vector<double> al_sample(const ALParams& params, std::uint64_t seed,
                              std::size_t n) {
  Rng rng(seed);
  return al_sample(params, rng, n);
}

ALMoments al_moments(const ALParams& params) {
  params.validate();
  double p = params.p, s = params.sigma;
  double q = 1.0 - p;
  // V = mu + X_R - X_L with independent X_R ~ Exp(p/s), X_L ~ Exp(q/s);
  // cumulants of exponentials add with alternating sign.
  double k1 = s / p - s / q;
  double k2 = s * s * (1.0 / (p * p) + 1.0 / (q * q));
  double k3 = 2.0 * s * s * s * (1.0 / (p * p * p) - 1.0 / (q * q * q));
  double s4 = s * s * s * s;
  double k4 = 6.0 * s4 * (1.0 / (p * p * p * p) + 1.0 / (q * q * q * q));
  ALMoments m;
  m.mean = params.mu + k1;
  m.variance = k2;
  m.third_central = k3;
  m.fourth_central = k4 + 3.0 * k2 * k2;
  return m;
}

MeanVar al_conditional_given_lambda(const ALParams& params, double lambda) {
  params.validate();
  if (!(lambda > 0.0))
    throw NumericalError("al_conditional_given_lambda: lambda must be > 0");
  double pq = params.p * (1.0 - params.p);
  MeanVar mv;
  mv.mean = params.mu + (0.5 - params.p) * params.sigma / (lambda * pq);
  mv.variance = params.sigma * params.sigma / (lambda * pq);
  return mv;
}

void InvGaussianParams::validate() const {
  require(mean > 0.0, "InvGaussianParams: mean must be > 0");
  require(shape > 0.0, "InvGaussianParams: shape must be > 0");
}

InvGaussianParams lambda_posterior(const ALParams& params, double u) {
  params.validate();
  require(u > 0.0, "lambda_posterior: u must be > 0");
  double pq = params.p * (1.0 - params.p);
  return {params.sigma / (2.0 * pq * std::sqrt(u)), 1.0 / (4.0 * pq)};
}

InvGaussianExpectations inv_gaussian_expectations(const InvGaussianParams& ig) {
  ig.validate();
  return {ig.mean, 1.0 / ig.mean + 1.0 / ig.shape};
}

// ---------------------------------------------------------------------------

void NoiseSpec::validate() const {
  std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, GaussianNoise>) {
          require(f.sd > 0.0, "gaussian noise: sd must be > 0");
        } else if constexpr (std::is_same_v<T, LaplaceNoise>) {
          require(f.scale > 0.0, "laplace noise: scale must be > 0");
        } else if constexpr (std::is_same_v<T, StudentTNoise>) {
          require(f.scale > 0.0, "student_t noise: scale must be > 0");
          require(f.nu > 2.0, "student_t noise: nu must be > 2");
        } else if constexpr (std::is_same_v<T, SkewNormalNoise>) {
          require(f.scale > 0.0, "skew_normal noise: scale must be > 0");
        } else if constexpr (std::is_same_v<T, GhSkewTNoise>) {
          require(f.scale > 0.0, "gh_skew_t noise: scale must be > 0");
          require(f.nu > 2.0, "gh_skew_t noise: nu must be > 2");
        } else if constexpr (std::is_same_v<T, ALParams>) {
          f.validate();
        } else if constexpr (std::is_same_v<T, ContaminatedGaussianNoise>) {
          require(!f.weights.empty() && f.weights.size() == f.means.size() &&
                      f.weights.size() == f.variances.size(),
                  "contaminated_gaussian: weights/means/variances sizes differ");
          double total = 0.0;
          for (double w : f.weights) {
            require(w >= 0.0 && w <= 1.0,
                    "contaminated_gaussian: weights must lie in [0,1]");
            total += w;
          }
          require(std::abs(total - 1.0) < 1e-12,
                  "contaminated_gaussian: weights must sum to 1");
          for (double v : f.variances)
            require(v > 0.0, "contaminated_gaussian: variances must be > 0");
        }
      },
      family);
}

double noise_draw(const NoiseSpec& spec, Rng& rng) {
  return std::visit(
      [&rng](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, GaussianNoise>) {
          return f.mean + f.sd * rng.normal();
        } else if constexpr (std::is_same_v<T, LaplaceNoise>) {
          double e = rng.exponential(1.0);
          return rng.uniform() < 0.5 ? f.mean + f.scale * e : f.mean - f.scale * e;
        } else if constexpr (std::is_same_v<T, StudentTNoise>) {
          return f.mean + f.scale * rng.student_t(f.nu);
        } else if constexpr (std::is_same_v<T, SkewNormalNoise>) {
          double delta = f.shape / std::sqrt(1.0 + f.shape * f.shape);
          double u = std::abs(rng.normal());
          double z = rng.normal();
          return f.location +
                 f.scale * (delta * u + std::sqrt(1.0 - delta * delta) * z);
        } else if constexpr (std::is_same_v<T, GhSkewTNoise>) {
          double w = rng.inverse_gamma(0.5 * f.nu, 0.5 * f.nu);
          return f.location + f.scale * (f.beta * w + std::sqrt(w) * rng.normal());
        } else if constexpr (std::is_same_v<T, ALParams>) {
          ALParams al = f;
          return al_draw(al, rng);
        } else {  // ContaminatedGaussianNoise
          double u = rng.uniform();
          double acc = 0.0;
          std::size_t idx = f.weights.size() - 1;
          for (std::size_t i = 0; i < f.weights.size(); ++i) {
            acc += f.weights[i];
            if (u < acc) {
              idx = i;
              break;
            }
          }
          return f.means[idx] + std::sqrt(f.variances[idx]) * rng.normal();
        }
      },
      spec.family);
}

std::vector<double> noise_sample(const NoiseSpec& spec, Rng& rng, std::size_t n) {
  spec.validate();
  require(n >= 1, "noise_sample: n must be >= 1");
  std::vector<double> out(n);
  for (auto& v : out) v = noise_draw(spec, rng);
  return out;
}

std::vector<double> noise_sample(const NoiseSpec& spec, std::uint64_t seed,
                                 std::size_t n) {
  Rng rng(seed);
  return noise_sample(spec, rng, n);
}

}  // namespace alssm
