#include "henonlab/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace henonlab {

ComplexPoint make_point(std::initializer_list<Complex> coords) {
  require(coords.size() <= static_cast<std::size_t>(kMaxDim), "point dimension exceeds kMaxDim");
  ComplexPoint z(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (const Complex& c : coords) z[i++] = c;
  return z;
}

bool all_finite(const ComplexPoint& z) {
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag())) return false;
  }
  return true;
}

Eigen::VectorXd singular_values(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues();
}

double smallest_singular_value(const ComplexMatrix& m) {
  const Eigen::VectorXd s = singular_values(m);
  return s.size() == 0 ? 0.0 : s[s.size() - 1];
}

ComplexMatrix orthonormal_columns(const ComplexMatrix& m) {
  Eigen::HouseholderQR<ComplexMatrix> qr(m);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m.rows(), m.cols());
  return q;
}

bool lex_less(const ComplexPoint& a, const ComplexPoint& b) {
  const Eigen::Index n = std::min(a.size(), b.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
  }
  return a.size() < b.size();
}

namespace {
std::atomic<unsigned> g_default_threads{0};
}

void set_default_threads(unsigned threads) { g_default_threads = threads; }

unsigned default_threads() {
  unsigned t = g_default_threads.load();
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return t;
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = default_threads();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    workers.emplace_back([&, w, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double halton(std::uint64_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0;
  while (index > 0) {
    f /= base;
    result += f * static_cast<double>(index % base);
    index /= base;
  }
  return result;
}

unsigned nth_prime(unsigned n) {
  unsigned count = 0;
  for (unsigned candidate = 2;; ++candidate) {
    bool prime = true;
    for (unsigned d = 2; d * d <= candidate; ++d) {
      if (candidate % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime && count++ == n) return candidate;
  }
}

double median(std::vector<double> values) { return percentile(std::move(values), 0.5); }

double percentile(std::vector<double> values, double q) {
  require(!values.empty(), "percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(values.size() - 1, lo + 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "fit_line needs at least two paired samples");
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0, "fit_line needs distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  if (x.size() > 2) fit.slope_stderr = std::sqrt(ss / (n - 2.0) / sxx);
  return fit;
}

}  // namespace henonlab
