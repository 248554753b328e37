#include <cmath>
#include <stdexcept>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "hsmoney/privkey.hpp"

namespace hsm {

namespace {

constexpr int kMaxIterations = 6000;
constexpr double kSizeTolerance = 1e-9;

// 2·(4·env)·2 reals -> isometry via Gram-Schmidt on the two columns.
CloningIsometry to_isometry(const double* x, int env_dim) {
  const std::size_t rows = 4 * static_cast<std::size_t>(env_dim);
  CloningIsometry v;
  v.env_dim = env_dim;
  for (int j = 0; j < 2; ++j) {
    v.columns[j].resize(rows);
    for (std::size_t r = 0; r < rows; ++r) v.columns[j][r] = Amp(x[2 * (j * rows + r)], x[2 * (j * rows + r) + 1]);
  }
  auto normalize = [](std::vector<Amp>& c) {
    double s = 0.0;
    for (const Amp& a : c) s += std::norm(a);
    s = std::sqrt(s);
    if (s < 1e-12) {
      c.assign(c.size(), 0.0);
      return false;
    }
    for (Amp& a : c) a /= s;
    return true;
  };
  bool ok = normalize(v.columns[0]);
  Amp proj = 0.0;
  for (std::size_t r = 0; r < rows; ++r) proj += std::conj(v.columns[0][r]) * v.columns[1][r];
  for (std::size_t r = 0; r < rows; ++r) v.columns[1][r] -= proj * v.columns[0][r];
  ok = normalize(v.columns[1]) && ok;
  if (!ok) v.env_dim = 0;
  return v;
}

struct Objective {
  int env_dim;
};

double negative_success(const gsl_vector* x, void* params) {
  const auto* obj = static_cast<const Objective*>(params);
  const CloningIsometry v = to_isometry(x->data, obj->env_dim);
  if (v.env_dim == 0) return 1.0;
  return -v.average_success();
}

}  // namespace

ClonerSearchResult optimize_cloner(int restarts, Rng& rng, int env_dim) {
  if (restarts < 1) throw std::invalid_argument("optimize_cloner: restarts must be positive");
  if (env_dim < 1 || env_dim > 8) throw std::invalid_argument("optimize_cloner: env_dim out of range");
  const std::size_t dim = 2 * 2 * 4 * static_cast<std::size_t>(env_dim);
  Objective obj{env_dim};
  gsl_multimin_function f{&negative_success, dim, &obj};

  ClonerSearchResult best;
  best.success = -1.0;
  gsl_vector* x = gsl_vector_alloc(dim);
  gsl_vector* step = gsl_vector_alloc(dim);
  gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
  for (int r = 0; r < restarts; ++r) {
    for (std::size_t i = 0; i < dim; ++i) gsl_vector_set(x, i, rng.normal());
    gsl_vector_set_all(step, 0.5);
    gsl_multimin_fminimizer_set(m, &f, x, step);
    for (int it = 0; it < kMaxIterations; ++it) {
      if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), kSizeTolerance) == GSL_SUCCESS) break;
    }
    const double value = -gsl_multimin_fminimizer_minimum(m);
    if (value > best.success) {
      best.success = value;
      best.best = to_isometry(gsl_multimin_fminimizer_x(m)->data, env_dim);
    }
  }
  best.restarts = restarts;
  gsl_multimin_fminimizer_free(m);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return best;
}

}  // namespace hsm
