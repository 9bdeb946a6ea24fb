#include <doctest.h>

#include <cmath>
#include <array>
#include <cstring>
#include <random>
#include <vector>

#include "wire/kernels.hpp"

using namespace wire::kern;

namespace {

struct BackendGuard {
  Backend saved;
  BackendGuard() : saved(active_backend()) {}
  ~BackendGuard() { set_backend(saved); }
};

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::Scalar};
  if (backend_available(Backend::Avx2)) out.push_back(Backend::Avx2);
  if (backend_available(Backend::Avx512)) out.push_back(Backend::Avx512);
  return out;
}

template <class T>
std::vector<T> random_vec(std::size_t n, std::mt19937_64& rng, double lo = -1.0,
                          double hi = 1.0) {
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53));
  return v;
}

template <class T>
bool bitwise_equal(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

}  // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("matmul matches brute-force triple loop") {
  std::mt19937_64 rng(7);
  const int m = 13, k = 9, n = 11;
  auto a = random_vec<double>(m * k, rng);
  auto b = random_vec<double>(k * n, rng);
  std::vector<double> c(m * n, 0.0), ref(m * n, 0.0);
  matmul(a.data(), b.data(), c.data(), m, k, n, Accum::Set);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int kk = 0; kk < k; ++kk) s += a[i * k + kk] * b[kk * n + j];
      ref[i * n + j] = s;
    }
  for (int i = 0; i < m * n; ++i) CHECK(c[i] == doctest::Approx(ref[i]).epsilon(1e-12));
}

TEST_CASE("matmul accumulate modes") {
  std::mt19937_64 rng(3);
  const int m = 4, k = 5, n = 6;
  auto a = random_vec<double>(m * k, rng);
  auto b = random_vec<double>(k * n, rng);
  std::vector<double> c0(m * n), c1(m * n, 0.5), c2(m * n, 0.5);
  matmul(a.data(), b.data(), c0.data(), m, k, n, Accum::Set);
  matmul(a.data(), b.data(), c1.data(), m, k, n, Accum::Add);
  matmul(a.data(), b.data(), c2.data(), m, k, n, Accum::Sub);
  for (int i = 0; i < m * n; ++i) {
    CHECK(c1[i] == doctest::Approx(0.5 + c0[i]));
    CHECK(c2[i] == doctest::Approx(0.5 - c0[i]));
  }
}

TEST_CASE_TEMPLATE("matmul is bit-identical across backends", T, double, float) {
  BackendGuard guard;
  std::mt19937_64 rng(11);
  // deliberately awkward sizes to exercise row and column tails
  const std::array<int, 3> sizes[] = {{1, 1, 1}, {5, 3, 7}, {17, 13, 33}, {23, 50, 181},
                                      {64, 181, 1}};
  for (auto [m, k, n] : sizes) {
    auto a = random_vec<T>((std::size_t)m * k, rng);
    auto b = random_vec<T>((std::size_t)k * n, rng);
    std::vector<std::vector<T>> results;
    for (Backend be : available_backends()) {
      set_backend(be);
      std::vector<T> c((std::size_t)m * n, T(0.25));
      matmul(a.data(), b.data(), c.data(), m, k, n, Accum::Add);
      results.push_back(std::move(c));
    }
    for (std::size_t i = 1; i < results.size(); ++i)
      CHECK(bitwise_equal(results[0], results[i]));
  }
}

TEST_CASE_TEMPLATE("elementwise kernels are bit-identical across backends", T, double,
                   float) {
  BackendGuard guard;
  std::mt19937_64 rng(5);
  const std::size_t n = 1003;  // odd length exercises tails
  auto x = random_vec<T>(n, rng);
  auto y = random_vec<T>(n, rng);
  auto backends = available_backends();

  auto run_all = [&](auto&& fn) {
    std::vector<std::vector<T>> outs;
    for (Backend be : backends) {
      set_backend(be);
      outs.push_back(fn());
    }
    for (std::size_t i = 1; i < outs.size(); ++i) CHECK(bitwise_equal(outs[0], outs[i]));
  };

  run_all([&] { std::vector<T> o(n); add(x.data(), y.data(), o.data(), n); return o; });
  run_all([&] { std::vector<T> o(n); sub(x.data(), y.data(), o.data(), n); return o; });
  run_all([&] { std::vector<T> o(n); mul(x.data(), y.data(), o.data(), n); return o; });
  run_all([&] { std::vector<T> o(n); scale(x.data(), T(1.7), o.data(), n); return o; });
  run_all([&] { std::vector<T> o = y; axpy(T(0.3), x.data(), o.data(), n); return o; });
  run_all([&] { std::vector<T> o = y; madd(x.data(), y.data(), o.data(), n); return o; });
  run_all([&] { std::vector<T> o = y; msub(x.data(), y.data(), o.data(), n); return o; });
}

TEST_CASE_TEMPLATE("vexp and vsincos are bit-identical across backends", T, double,
                   float) {
  BackendGuard guard;
  std::mt19937_64 rng(13);
  const std::size_t n = 4099;
  auto x = random_vec<T>(n, rng, -600.0, 600.0);
  x[0] = T(0);
  x[1] = T(-0.0);
  auto backends = available_backends();

  std::vector<std::vector<T>> exps, sins, coss;
  for (Backend be : backends) {
    set_backend(be);
    std::vector<T> e(n), s(n), c(n);
    vexp(x.data(), e.data(), n);
    vsincos(x.data(), s.data(), c.data(), n);
    exps.push_back(std::move(e));
    sins.push_back(std::move(s));
    coss.push_back(std::move(c));
  }
  for (std::size_t i = 1; i < backends.size(); ++i) {
    CHECK(bitwise_equal(exps[0], exps[i]));
    CHECK(bitwise_equal(sins[0], sins[i]));
    CHECK(bitwise_equal(coss[0], coss[i]));
  }
}

TEST_CASE("vexp accuracy against libm") {
  std::mt19937_64 rng(17);
  const std::size_t n = 20000;
  auto x = random_vec<double>(n, rng, -700.0, 700.0);
  x[0] = 0.0;
  x[1] = 1.0;
  x[2] = -1.0;
  std::vector<double> e(n);
  vexp(x.data(), e.data(), n);
  CHECK(e[0] == 1.0);  // exact
  for (std::size_t i = 0; i < n; ++i) {
    double ref = std::exp(x[i]);
    if (ref == 0.0 || !std::isfinite(ref)) continue;
    CHECK(std::abs(e[i] - ref) / ref <= 4e-15);
  }
}

TEST_CASE("vsincos accuracy against libm") {
  std::mt19937_64 rng(19);
  const std::size_t n = 20000;
  auto x = random_vec<double>(n, rng, -1e4, 1e4);
  x[0] = 0.0;
  std::vector<double> s(n), c(n);
  vsincos(x.data(), s.data(), c.data(), n);
  CHECK(s[0] == 0.0);
  CHECK(c[0] == 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(std::abs(s[i] - std::sin(x[i])) <= 5e-15);
    CHECK(std::abs(c[i] - std::cos(x[i])) <= 5e-15);
    // pythagorean identity stays tight
    CHECK(std::abs(s[i] * s[i] + c[i] * c[i] - 1.0) <= 1e-15);
  }
}

TEST_CASE("adam kernel matches hand-computed first step and is backend-stable") {
  BackendGuard guard;
  const std::size_t n = 37;
  double lr = 1e-2, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double bc1 = 1.0 / (1.0 - b1), bc2 = 1.0 / (1.0 - b2);

  std::mt19937_64 rng(23);
  auto g = random_vec<double>(n, rng);
  std::vector<std::vector<double>> results;
  for (Backend be : available_backends()) {
    set_backend(be);
    std::vector<double> p(n, 0.5), m(n, 0.0), v(n, 0.0);
    adam_update(p.data(), g.data(), m.data(), v.data(), n, lr, b1, b2, eps, bc1, bc2);
    results.push_back(std::move(p));
  }
  for (std::size_t i = 1; i < results.size(); ++i)
    CHECK(bitwise_equal(results[0], results[i]));

  // first bias-corrected step reduces to lr*g/(|g|+eps) ~= lr*sign(g)
  for (std::size_t i = 0; i < n; ++i) {
    double expected = 0.5 - lr * g[i] / (std::abs(g[i]) + eps);
    CHECK(results[0][i] == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("transpose and reductions") {
  std::mt19937_64 rng(29);
  const int r = 37, c = 53;
  auto m = random_vec<double>((std::size_t)r * c, rng);
  std::vector<double> t((std::size_t)r * c);
  transpose(m.data(), t.data(), r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) CHECK(t[j * r + i] == m[i * c + j]);

  std::vector<double> ones(100, 1.0);
  CHECK(reduce_sum(ones.data(), 100) == 100.0);
  std::vector<double> a(10, 2.0), b(10, 1.0);
  CHECK(reduce_sumsq_diff(a.data(), b.data(), 10) == doctest::Approx(10.0));
  CHECK(all_finite(a.data(), 10));
  a[3] = std::nan("");
  CHECK(!all_finite(a.data(), 10));
}

TEST_CASE("backend dispatch controls") {
  BackendGuard guard;
  CHECK(backend_available(Backend::Scalar));
  set_backend(Backend::Scalar);
  CHECK(active_backend() == Backend::Scalar);
  CHECK(std::string(backend_name(Backend::Scalar)) == "scalar");
}

TEST_SUITE_END();
