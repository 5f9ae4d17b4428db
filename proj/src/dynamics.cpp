#include "gdp/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "gdp/numerics.hpp"

namespace gdp {

// ---------------------------------------------------------------------------
// Cylinder functions
// ---------------------------------------------------------------------------

CylinderFunction::CylinderFunction(std::vector<std::vector<double>> inner,
                                   OuterMap outer)
    : inner_(std::move(inner)), outer_(std::move(outer)) {
  if (inner_.empty()) {
    throw std::invalid_argument("CylinderFunction: needs inner functions");
  }
  dim_ = inner_[0].size();
  for (const auto& f : inner_) {
    if (f.size() != dim_) {
      throw std::invalid_argument("CylinderFunction: inner size mismatch");
    }
  }
}

std::vector<double> CylinderFunction::project(
    const std::vector<double>& mu) const {
  if (mu.size() != dim_) {
    throw std::invalid_argument("CylinderFunction: dimension mismatch");
  }
  std::vector<double> y(inner_.size(), 0.0);
  for (std::size_t i = 0; i < inner_.size(); ++i) {
    for (std::size_t s = 0; s < dim_; ++s) y[i] += inner_[i][s] * mu[s];
  }
  return y;
}

double CylinderFunction::value(const std::vector<double>& mu) const {
  return outer_.value(project(mu));
}

std::vector<double> CylinderFunction::first_variation(
    const std::vector<double>& mu) const {
  auto y = project(mu);
  auto grad = outer_.gradient(y);
  std::vector<double> out(dim_, 0.0);
  for (std::size_t s = 0; s < dim_; ++s) {
    for (std::size_t i = 0; i < inner_.size(); ++i) {
      out[s] += grad[i] * inner_[i][s];
    }
  }
  return out;
}

std::vector<std::vector<double>> CylinderFunction::second_variation(
    const std::vector<double>& mu) const {
  auto y = project(mu);
  auto hess = outer_.hessian(y);
  std::vector<std::vector<double>> out(dim_, std::vector<double>(dim_, 0.0));
  for (std::size_t i = 0; i < inner_.size(); ++i) {
    for (std::size_t j = 0; j < inner_.size(); ++j) {
      double h = hess[i][j];
      if (h == 0.0) continue;
      for (std::size_t s1 = 0; s1 < dim_; ++s1) {
        double hi = h * inner_[i][s1];
        for (std::size_t s2 = 0; s2 < dim_; ++s2) {
          out[s1][s2] += hi * inner_[j][s2];
        }
      }
    }
  }
  return out;
}

CylinderFunction CylinderFunction::constant(double c, std::size_t dim) {
  OuterMap outer;
  outer.value = [c](const std::vector<double>&) { return c; };
  outer.gradient = [](const std::vector<double>&) {
    return std::vector<double>{0.0};
  };
  outer.hessian = [](const std::vector<double>&) {
    return std::vector<std::vector<double>>{{0.0}};
  };
  return CylinderFunction({std::vector<double>(dim, 0.0)}, std::move(outer));
}

CylinderFunction CylinderFunction::linear(std::vector<double> f) {
  OuterMap outer;
  outer.value = [](const std::vector<double>& y) { return y[0]; };
  outer.gradient = [](const std::vector<double>&) {
    return std::vector<double>{1.0};
  };
  outer.hessian = [](const std::vector<double>&) {
    return std::vector<std::vector<double>>{{0.0}};
  };
  return CylinderFunction({std::move(f)}, std::move(outer));
}

CylinderFunction CylinderFunction::monomial(
    std::vector<std::vector<double>> fs, std::vector<int> powers) {
  if (fs.size() != powers.size() || fs.empty()) {
    throw std::invalid_argument("monomial: sizes must match and be nonempty");
  }
  auto n = fs.size();
  OuterMap outer;
  outer.value = [powers](const std::vector<double>& y) {
    double v = 1.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      v *= std::pow(y[i], powers[i]);
    }
    return v;
  };
  outer.gradient = [powers, n](const std::vector<double>& y) {
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double v = static_cast<double>(powers[i]);
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        v *= std::pow(y[j], (i == j) ? powers[j] - 1 : powers[j]);
      }
      g[i] = v;
    }
    return g;
  };
  outer.hessian = [powers, n](const std::vector<double>& y) {
    std::vector<std::vector<double>> h(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double ki = powers[i], kj = powers[j];
        double v = (i == j) ? ki * (ki - 1.0) : ki * kj;
        if (v == 0.0) continue;
        for (std::size_t l = 0; l < n; ++l) {
          int drop = (l == i ? 1 : 0) + (l == j ? 1 : 0);
          v *= std::pow(y[l], powers[l] - drop);
        }
        h[i][j] = v;
      }
    }
    return h;
  };
  return CylinderFunction(std::move(fs), std::move(outer));
}

CylinderFunction CylinderFunction::exponential(std::vector<double> f,
                                               double c) {
  OuterMap outer;
  outer.value = [c](const std::vector<double>& y) { return std::exp(c * y[0]); };
  outer.gradient = [c](const std::vector<double>& y) {
    return std::vector<double>{c * std::exp(c * y[0])};
  };
  outer.hessian = [c](const std::vector<double>& y) {
    return std::vector<std::vector<double>>{{c * c * std::exp(c * y[0])}};
  };
  return CylinderFunction({std::move(f)}, std::move(outer));
}

CylinderFunction CylinderFunction::product(const CylinderFunction& a,
                                           const CylinderFunction& b) {
  if (a.dim_ != b.dim_) {
    throw std::invalid_argument("product: base space dimension mismatch");
  }
  auto na = a.inner_.size();
  auto nb = b.inner_.size();
  std::vector<std::vector<double>> inner = a.inner_;
  inner.insert(inner.end(), b.inner_.begin(), b.inner_.end());
  OuterMap oa = a.outer_, ob = b.outer_;

  auto split = [na, nb](const std::vector<double>& y) {
    return std::pair(std::vector<double>(y.begin(), y.begin() + na),
                     std::vector<double>(y.begin() + na, y.begin() + na + nb));
  };
  OuterMap outer;
  outer.value = [oa, ob, split](const std::vector<double>& y) {
    auto [ya, yb] = split(y);
    return oa.value(ya) * ob.value(yb);
  };
  outer.gradient = [oa, ob, split, na, nb](const std::vector<double>& y) {
    auto [ya, yb] = split(y);
    double va = oa.value(ya), vb = ob.value(yb);
    auto ga = oa.gradient(ya);
    auto gb = ob.gradient(yb);
    std::vector<double> g(na + nb);
    for (std::size_t i = 0; i < na; ++i) g[i] = ga[i] * vb;
    for (std::size_t j = 0; j < nb; ++j) g[na + j] = va * gb[j];
    return g;
  };
  outer.hessian = [oa, ob, split, na, nb](const std::vector<double>& y) {
    auto [ya, yb] = split(y);
    double va = oa.value(ya), vb = ob.value(yb);
    auto ga = oa.gradient(ya);
    auto gb = ob.gradient(yb);
    auto ha = oa.hessian(ya);
    auto hb = ob.hessian(yb);
    std::vector<std::vector<double>> h(na + nb,
                                       std::vector<double>(na + nb, 0.0));
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < na; ++j) h[i][j] = ha[i][j] * vb;
      for (std::size_t j = 0; j < nb; ++j) h[i][na + j] = ga[i] * gb[j];
    }
    for (std::size_t i = 0; i < nb; ++i) {
      for (std::size_t j = 0; j < na; ++j) h[na + i][j] = gb[i] * ga[j];
      for (std::size_t j = 0; j < nb; ++j) h[na + i][na + j] = va * hb[i][j];
    }
    return h;
  };
  return CylinderFunction(std::move(inner), std::move(outer));
}

CylinderFunction CylinderFunction::normalized_lift(const CylinderFunction& phi,
                                                   int power) {
  auto n = phi.inner_.size();
  double p = static_cast<double>(power);
  std::vector<std::vector<double>> inner = phi.inner_;
  inner.push_back(std::vector<double>(phi.dim_, 1.0));  // r = <mu, 1>
  OuterMap op = phi.outer_;

  auto split = [n](const std::vector<double>& y) {
    return std::pair(std::vector<double>(y.begin(), y.begin() + n), y[n]);
  };
  auto rescale = [n](const std::vector<double>& y, double r) {
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = y[i] / r;
    return z;
  };
  OuterMap outer;
  outer.value = [op, split, rescale, p](const std::vector<double>& y) {
    auto [yf, r] = split(y);
    return std::pow(r, p) * op.value(rescale(yf, r));
  };
  outer.gradient = [op, split, rescale, p, n](const std::vector<double>& y) {
    auto [yf, r] = split(y);
    auto z = rescale(yf, r);
    double v = op.value(z);
    auto g = op.gradient(z);
    double s1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) s1 += yf[i] * g[i];
    std::vector<double> out(n + 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::pow(r, p - 1.0) * g[i];
    out[n] = p * std::pow(r, p - 1.0) * v - std::pow(r, p - 2.0) * s1;
    return out;
  };
  outer.hessian = [op, split, rescale, p, n](const std::vector<double>& y) {
    auto [yf, r] = split(y);
    auto z = rescale(yf, r);
    double v = op.value(z);
    auto g = op.gradient(z);
    auto hz = op.hessian(z);
    double s1 = 0.0, s2 = 0.0;
    std::vector<double> hy(n, 0.0);  // sum_j y_j h_ij
    for (std::size_t i = 0; i < n; ++i) {
      s1 += yf[i] * g[i];
      for (std::size_t j = 0; j < n; ++j) hy[i] += yf[j] * hz[i][j];
    }
    for (std::size_t i = 0; i < n; ++i) s2 += yf[i] * hy[i];
    std::vector<std::vector<double>> h(n + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        h[i][j] = std::pow(r, p - 2.0) * hz[i][j];
      }
      h[i][n] = (p - 1.0) * std::pow(r, p - 2.0) * g[i] -
                std::pow(r, p - 3.0) * hy[i];
      h[n][i] = h[i][n];
    }
    h[n][n] = p * (p - 1.0) * std::pow(r, p - 2.0) * v -
              (2.0 * p - 2.0) * std::pow(r, p - 3.0) * s1 +
              std::pow(r, p - 4.0) * s2;
    return h;
  };
  return CylinderFunction(std::move(inner), std::move(outer));
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

GeneratorParams GeneratorParams::MBI(double theta, double lambda,
                                     BaseSpace nu0) {
  if (!(theta > 0.0)) throw std::invalid_argument("MBI: theta must be > 0");
  if (!nu0.is_finite()) {
    throw std::invalid_argument("MBI generator: finite-discrete space only");
  }
  GeneratorParams p(Kind::mbi, std::move(nu0));
  p.theta_ = theta;
  p.lambda_ = lambda;
  return p;
}

GeneratorParams GeneratorParams::FVP(double theta, BaseSpace nu0) {
  if (!(theta > 0.0)) throw std::invalid_argument("FVP: theta must be > 0");
  if (!nu0.is_finite()) {
    throw std::invalid_argument("FVP generator: finite-discrete space only");
  }
  GeneratorParams p(Kind::fvp, std::move(nu0));
  p.theta_ = theta;
  return p;
}

GeneratorParams GeneratorParams::General(TestFunction a, TestFunction b,
                                         AtomicMeasure mu0, BaseSpace space) {
  if (!space.is_finite()) {
    throw std::invalid_argument("General generator: finite-discrete space only");
  }
  if (!(a.lower() > 0.0) || !(b.lower() > 0.0)) {
    throw std::invalid_argument("General generator: a, b must be positive");
  }
  GeneratorParams p(Kind::general, std::move(space));
  p.a_ = std::move(a);
  p.b_ = std::move(b);
  p.mu0_ = std::move(mu0);
  return p;
}

double apply_generator(const GeneratorParams& params,
                       const CylinderFunction& f, const AtomicMeasure& point) {
  const BaseSpace& space = params.space();
  auto mu = point.coordinates(space);
  if (mu.size() != f.space_dim()) {
    throw std::invalid_argument("apply_generator: dimension mismatch");
  }
  auto v = f.first_variation(mu);
  auto h = f.second_variation(mu);
  auto d = mu.size();

  switch (params.kind()) {
    case GeneratorParams::Kind::mbi: {
      double acc = 0.0;
      for (std::size_t s = 0; s < d; ++s) {
        acc += mu[s] * h[s][s];
        acc += (params.theta() * space.base_prob(static_cast<int>(s)) -
                params.lambda() * mu[s]) *
               v[s];
      }
      return 0.5 * acc;
    }
    case GeneratorParams::Kind::fvp: {
      double mass = point.total_mass();
      if (std::fabs(mass - 1.0) > 1e-6) {
        throw std::invalid_argument(
            "apply_generator: FVP needs a probability measure");
      }
      double acc = 0.0;
      for (std::size_t s1 = 0; s1 < d; ++s1) {
        double row = h[s1][s1];
        for (std::size_t s2 = 0; s2 < d; ++s2) row -= mu[s2] * h[s1][s2];
        acc += mu[s1] * row;
      }
      for (std::size_t s = 0; s < d; ++s) {
        acc += params.theta() *
               (space.base_prob(static_cast<int>(s)) - mu[s]) * v[s];
      }
      return 0.5 * acc;
    }
    case GeneratorParams::Kind::general: {
      double acc = 0.0;
      auto m0 = params.mu0().coordinates(space);
      for (std::size_t s = 0; s < d; ++s) {
        auto loc = static_cast<Location>(s);
        acc += mu[s] * params.a()(loc) * h[s][s];
        acc += (m0[s] - params.b()(loc) * mu[s]) * v[s];
      }
      return acc;
    }
  }
  throw std::logic_error("apply_generator: unreachable");
}

double carre_du_champ(const GeneratorParams& params, const CylinderFunction& f,
                      const CylinderFunction& g, const AtomicMeasure& point) {
  if (params.kind() != GeneratorParams::Kind::general) {
    throw std::invalid_argument(
        "carre_du_champ: defined for the general generator");
  }
  auto mu = point.coordinates(params.space());
  auto vf = f.first_variation(mu);
  auto vg = g.first_variation(mu);
  double acc = 0.0;
  for (std::size_t s = 0; s < mu.size(); ++s) {
    acc += mu[s] * params.a()(static_cast<Location>(s)) * vf[s] * vg[s];
  }
  return acc;
}

double check_projection_identity(double theta, double lambda,
                                 const BaseSpace& nu0,
                                 const CylinderFunction& phi,
                                 const AtomicMeasure& mu,
                                 ProjectionVariant variant) {
  if (!(mu.total_mass() > 0.0)) {
    throw std::invalid_argument("check_projection_identity: mu(S) > 0");
  }
  auto lifted = CylinderFunction::normalized_lift(phi, 3);
  auto mbi = GeneratorParams::MBI(theta, lambda, nu0);
  auto fvp = GeneratorParams::FVP(theta, nu0);
  double lhs = apply_generator(mbi, lifted, mu);

  double r = mu.total_mass();
  auto hat = normalize(mu).merged();
  auto hat_coords = hat.coordinates(nu0);
  double c = (variant == ProjectionVariant::corrected) ? 1.0 : 2.0;
  double rhs = r * r * apply_generator(fvp, phi, hat) +
               3.0 * r * r * ((theta - lambda * r) / 2.0 + c) *
                   phi.value(hat_coords);
  double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
  return std::fabs(lhs - rhs) / scale;
}

// ---------------------------------------------------------------------------
// Transition samplers
// ---------------------------------------------------------------------------

namespace {

// draws a location from the atoms of mu proportionally to their weights
Location sample_atom_location(const AtomicMeasure& mu, RngStream& rng) {
  double u = rng.uniform() * mu.total_mass();
  double cum = 0.0;
  for (const auto& a : mu.atoms()) {
    cum += a.weight;
    if (u < cum) return a.location;
  }
  return mu.atoms().back().location;
}

// location sampler for the mixture base (n eta_n + theta nu0) / (n + theta)
LocationSampler mixture_base_sampler(std::vector<Location> empirical,
                                     double theta, const BaseSpace& nu0) {
  double n = static_cast<double>(empirical.size());
  return [empirical = std::move(empirical), p_emp = n / (n + theta),
          &nu0](RngStream& rng) -> Location {
    if (!empirical.empty() && rng.uniform() < p_emp) {
      return empirical[rng.uniform_below(empirical.size())];
    }
    return nu0.sample_location(rng);
  };
}

std::vector<Location> draw_empirical_support(const AtomicMeasure& mu,
                                             long long n, RngStream& rng) {
  std::vector<Location> xs;
  xs.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    xs.push_back(sample_atom_location(mu, rng));
  }
  return xs;
}

}  // namespace

AtomicMeasure sample_Q1(double t, const AtomicMeasure& mu, double theta,
                        double lambda, const BaseSpace& nu0,
                        const TruncationPolicy& trunc, RngStream& rng) {
  if (!(t > 0.0)) throw std::invalid_argument("sample_Q1: t must be > 0");
  if (!(theta > 0.0)) throw std::invalid_argument("sample_Q1: theta > 0");
  double mass = mu.total_mass();
  long long n = (mass > 0.0) ? rng.poisson(mass / c_factor(lambda, t)) : 0;
  auto xs = draw_empirical_support(mu, n, rng);
  auto base = mixture_base_sampler(std::move(xs), theta, nu0);
  return sample_gamma_measure_at(theta + static_cast<double>(n), base,
                                 c_factor(-lambda, t), trunc, rng);
}

AtomicMeasure sample_Q2(double t, const AtomicMeasure& nu, double theta,
                        const BaseSpace& nu0, const TruncationPolicy& trunc,
                        RngStream& rng, const TavareTable* table) {
  if (!(t > 0.0)) throw std::invalid_argument("sample_Q2: t must be > 0");
  if (std::fabs(nu.total_mass() - 1.0) > 1e-6) {
    throw std::invalid_argument("sample_Q2: nu must be a probability");
  }
  TavareTable local;
  if (table == nullptr) {
    local = tavare_table(theta, t);
    table = &local;
  }
  long long n = table->exact ? table->sample(rng)
                             : simulate_kingman(theta, t, -1, rng);
  auto xs = draw_empirical_support(nu, n, rng);
  auto base = mixture_base_sampler(std::move(xs), theta, nu0);
  return sample_dirichlet_process_at(theta + static_cast<double>(n), base,
                                     trunc, rng);
}

AtomicMeasure sample_Y_via_count(double t, const AtomicMeasure& mu,
                                 double theta, double lambda,
                                 const BaseSpace& nu0,
                                 const TruncationPolicy& trunc, RngStream& rng,
                                 double t0) {
  double mass = mu.total_mass();
  long long n = (mass > 0.0) ? death_count_at(mass, lambda, t0, t, rng) : 0;
  auto xs = draw_empirical_support(mu, n, rng);
  auto base = mixture_base_sampler(std::move(xs), theta, nu0);
  return sample_gamma_measure_at(theta + static_cast<double>(n), base,
                                 c_factor(-lambda, t), trunc, rng);
}

AtomicMeasure sample_X_via_time_change(double t, const AtomicMeasure& mu,
                                       double theta, double lambda,
                                       const BaseSpace& nu0,
                                       const TruncationPolicy& trunc,
                                       RngStream& rng, double t0,
                                       const EarlySegment* early) {
  double mass = mu.total_mass();
  if (!(mass > 0.0)) {
    throw std::invalid_argument("sample_X_via_time_change: mu(S) > 0");
  }
  auto tc = death_count_time_changed(mass, lambda, theta, t0, t, rng, early);
  auto xs = draw_empirical_support(mu, tc.count, rng);
  auto base = mixture_base_sampler(std::move(xs), theta, nu0);
  auto y = sample_gamma_measure_at(theta + static_cast<double>(tc.count), base,
                                   c_factor(-lambda, t), trunc, rng);
  return normalize(y);
}

std::vector<double> sde_oracle(const TestFunction& a, const TestFunction& b,
                               const AtomicMeasure& mu0,
                               const BaseSpace& space,
                               const std::vector<double>& start, double t,
                               double step, RngStream& rng) {
  if (!space.is_finite()) {
    throw std::invalid_argument("sde_oracle: finite-discrete space only");
  }
  if (!(step > 0.0) || !(t > 0.0)) {
    throw std::invalid_argument("sde_oracle: t, step must be > 0");
  }
  auto m0 = mu0.coordinates(space);
  std::vector<double> x = start;
  if (x.size() != m0.size()) {
    throw std::invalid_argument("sde_oracle: dimension mismatch");
  }
  long long steps = static_cast<long long>(std::ceil(t / step));
  double dt = t / static_cast<double>(steps);
  double sdt = std::sqrt(dt);
  for (long long k = 0; k < steps; ++k) {
    for (std::size_t s = 0; s < x.size(); ++s) {
      auto loc = static_cast<Location>(s);
      double xp = std::max(x[s], 0.0);
      x[s] += (m0[s] - b(loc) * xp) * dt +
              std::sqrt(2.0 * a(loc) * xp) * sdt * rng.normal();
    }
  }
  for (double& v : x) v = std::max(v, 0.0);
  return x;
}

}  // namespace gdp
