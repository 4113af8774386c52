#pragma once

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/core/rng.hpp"

namespace specsub {

enum class SpectrumLaw { beta, list, rank_noise, power };

// Spectrum of a random test matrix. beta: n iid Beta(a, b) draws; list: explicit
// values; rank_noise: r unit eigenvalues plus n - r draws of |N(0, noise^2)|;
// power: mu_i = i^-a.
struct SpectrumSpec {
  Index n = 0;
  SpectrumLaw law = SpectrumLaw::beta;
  double a = 1.0;
  double b = 3.0;
  std::vector<double> values;
  Index rank = 1;
  double noise = 0.0;
  double scale = 1.0;
};

// "beta:a:b", "list:v1,v2,...", "rank:r:noise", "power:a".
inline SpectrumSpec parse_spectrum_law(const std::string& text, Index n) {
  SpectrumSpec s;
  s.n = n;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto num = [&](const std::string& v) {
    try {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw Error(Errc::invalid_argument, "spectrum law: bad number '" + v + "'");
    }
  };
  require(!parts.empty(), "spectrum law: empty");
  if (parts[0] == "beta" && parts.size() == 3) {
    s.law = SpectrumLaw::beta;
    s.a = num(parts[1]);
    s.b = num(parts[2]);
    require(s.a > 0.0 && s.b > 0.0, "spectrum law: beta parameters must be positive");
  } else if (parts[0] == "list" && parts.size() == 2) {
    s.law = SpectrumLaw::list;
    std::stringstream vs(parts[1]);
    for (std::string v; std::getline(vs, v, ',');) s.values.push_back(num(v));
    require(static_cast<Index>(s.values.size()) == n, "spectrum law: list needs exactly n values");
  } else if (parts[0] == "rank" && parts.size() == 3) {
    s.law = SpectrumLaw::rank_noise;
    s.rank = static_cast<Index>(num(parts[1]));
    s.noise = num(parts[2]);
    require(s.rank >= 1 && s.rank <= n && s.noise >= 0.0, "spectrum law: bad rank or noise");
  } else if (parts[0] == "power" && parts.size() == 2) {
    s.law = SpectrumLaw::power;
    s.a = num(parts[1]);
    require(s.a >= 0.0, "spectrum law: power exponent must be >= 0");
  } else {
    throw Error(Errc::invalid_argument, "spectrum law: expected beta:a:b, list:v1,...,vn, rank:r:noise or power:a, got '" +
                                            text + "'");
  }
  return s;
}

// Gamma(shape, 1) by Marsaglia and Tsang, boosted for shape < 1.
inline double gamma_draw(double shape, RngStream& rng) {
  if (shape < 1.0) return gamma_draw(shape + 1.0, rng) * std::pow(rng.uniform_pos(), 1.0 / shape);
  const double d = shape - 1.0 / 3.0, c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0, v = 0.0;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_pos();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

inline double beta_draw(double a, double b, RngStream& rng) {
  const double x = gamma_draw(a, rng), y = gamma_draw(b, rng);
  return x + y > 0.0 ? x / (x + y) : 0.0;
}

// Requested eigenvalues, descending.
inline Vector sample_spectrum(const SpectrumSpec& s, RngStream& rng) {
  require(s.n >= 1, "spectrum: n must be >= 1");
  Vector mu(s.n);
  switch (s.law) {
    case SpectrumLaw::beta:
      for (Index i = 0; i < s.n; ++i) mu[i] = beta_draw(s.a, s.b, rng);
      break;
    case SpectrumLaw::list:
      for (Index i = 0; i < s.n; ++i) mu[i] = s.values[static_cast<std::size_t>(i)];
      break;
    case SpectrumLaw::rank_noise:
      for (Index i = 0; i < s.n; ++i) mu[i] = i < s.rank ? 1.0 : std::abs(s.noise * rng.normal());
      break;
    case SpectrumLaw::power:
      for (Index i = 0; i < s.n; ++i) mu[i] = std::pow(static_cast<double>(i + 1), -s.a);
      break;
  }
  mu *= s.scale;
  std::sort(mu.data(), mu.data() + mu.size(), std::greater<>());
  return mu;
}

// Haar orthogonal matrix: Q from the QR factorization of a Gaussian matrix,
// with the columns signed so that diag(R) > 0.
inline DenseMatrix haar_orthogonal(Index n, RngStream& rng) {
  DenseMatrix g(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  DenseMatrix q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

inline SymMatrix matrix_with_spectrum(const Vector& mu, RngStream& rng) {
  const DenseMatrix q = haar_orthogonal(mu.size(), rng);
  return SymMatrix(q * mu.asDiagonal() * q.transpose());
}

struct SpectrumMatrix {
  SymMatrix x;
  Vector mu;
};

inline SpectrumMatrix random_spectrum_matrix(const SpectrumSpec& s, RngStream& rng) {
  require(s.n >= 2, "random_spectrum_matrix: n must be >= 2");
  SpectrumMatrix out;
  out.mu = sample_spectrum(s, rng);
  out.x = matrix_with_spectrum(out.mu, rng);
  return out;
}

// ||mu||_2^2 / max mu_i^2
inline double spectrum_numerical_rank(const Vector& mu) {
  const double top = mu.cwiseAbs().maxCoeff();
  require(top > 0.0, "numerical rank: zero spectrum");
  return mu.squaredNorm() / (top * top);
}

}  // namespace specsub
