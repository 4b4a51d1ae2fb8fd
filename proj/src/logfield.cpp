#include "gmclab/logfield.hpp"

#include <unsupported/Eigen/FFT>

#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>

#include "gmclab/rng.hpp"

namespace gmclab {

static_assert(std::endian::native == std::endian::little,
              "binary field dumps assume a little-endian host");

namespace {
constexpr int kDenseLimit = 12;
}

std::string to_string(SamplingMethod m) {
  switch (m) {
    case SamplingMethod::kAuto: return "auto";
    case SamplingMethod::kDense: return "dense-factorization";
    case SamplingMethod::kCirculant: return "circulant-embedding";
  }
  return "?";
}

SamplingMethod sampling_method_from_string(const std::string& s) {
  if (s == "auto") return SamplingMethod::kAuto;
  if (s == "dense-factorization" || s == "dense") return SamplingMethod::kDense;
  if (s == "circulant-embedding" || s == "circulant") return SamplingMethod::kCirculant;
  throw Error("unknown sampling method: " + s);
}

double kernel_value(double d, double eps) {
  // The linear branch is grouped as log(1/eps) + (1 - d/eps) so that the two
  // branches agree bit-for-bit at d == eps.
  if (d < eps) return 2.0 * (std::log(1.0 / eps) + (1.0 - d / eps));
  return 2.0 * std::log(1.0 / d);
}

double regularized_covariance(double x, double y, ScaleParameter eps) {
  return kernel_value(std::fabs(x - y), eps.epsilon());
}

Eigen::MatrixXd build_covariance(const DyadicGrid& grid, ScaleParameter eps) {
  if (grid.resolution > kDenseLimit)
    throw CapacityLimitError("dense covariance is limited to resolution n <= 12 (got n = " +
                             std::to_string(grid.resolution) + ")");
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double ell = grid.cell_length();
  const double e = eps.epsilon();
  // Toeplitz: entry depends on |i-j| only; |x_i - x_j| = |i-j| * 2^-n exactly.
  std::vector<double> row(static_cast<std::size_t>(n));
  for (Eigen::Index d = 0; d < n; ++d) row[static_cast<std::size_t>(d)] = kernel_value(d * ell, e);
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = row[static_cast<std::size_t>(std::abs(i - j))];
  return c;
}

FieldSampler::FieldSampler(DyadicGrid grid, ScaleParameter eps, SamplerOptions opts)
    : grid_(grid), eps_(eps), method_(opts.method) {
  if (method_ == SamplingMethod::kAuto)
    method_ = grid_.resolution <= kDenseLimit ? SamplingMethod::kDense : SamplingMethod::kCirculant;

  if (method_ == SamplingMethod::kDense) {
    Eigen::MatrixXd c = build_covariance(grid_, eps_);
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) {
      jitter_ = opts.jitter * c(0, 0);
      c.diagonal().array() += jitter_;
      llt.compute(c);
      if (llt.info() != Eigen::Success) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(c);
        const double min_eig = ldlt.vectorD().minCoeff();
        throw FactorizationError(
            "covariance factorization failed beyond jitter tolerance; min pivot " +
                std::to_string(min_eig),
            min_eig);
      }
    }
    chol_ = llt.matrixL();
  } else {
    // Stationary embedding in a circulant of size M = 2^{n+1}; wrap distance
    // min(l, M-l) * 2^-n stays within [0, 1] where the kernel is defined.
    const std::size_t n = grid_.size();
    const std::size_t m = 2 * n;
    const double ell = grid_.cell_length();
    const double e = eps_.epsilon();
    std::vector<std::complex<double>> c(m), lam(m);
    for (std::size_t l = 0; l < m; ++l) {
      const double wrap = static_cast<double>(std::min(l, m - l));
      c[l] = kernel_value(wrap * ell, e);
    }
    Eigen::FFT<double> fft;
    fft.fwd(lam, c);
    double min_l = 0.0, max_l = 0.0;
    for (const auto& v : lam) {
      min_l = std::min(min_l, v.real());
      max_l = std::max(max_l, v.real());
    }
    clip_ = min_l < 0.0 ? -min_l : 0.0;
    if (clip_ > opts.clip_tolerance * max_l)
      throw EmbeddingError("circulant embedding clipped eigenvalue of magnitude " +
                               std::to_string(clip_) + " beyond tolerance",
                           clip_);
    sqrt_lambda_.resize(m);
    for (std::size_t l = 0; l < m; ++l)
      sqrt_lambda_[l] = std::sqrt(std::max(lam[l].real(), 0.0) / static_cast<double>(m));
  }
}

FieldSample FieldSampler::sample(std::uint64_t seed) const {
  FieldSample out{grid_, eps_, {}, seed, method_, clip_, jitter_};
  const std::size_t n = grid_.size();
  CounterRng rng(seed, tag::kField, 0);

  if (method_ == SamplingMethod::kDense) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>() * z;
    out.values.assign(v.data(), v.data() + v.size());
  } else {
    const std::size_t m = 2 * n;
    std::vector<std::complex<double>> eta(m), w(m);
    for (std::size_t l = 0; l < m; ++l) {
      const double a = rng.normal();
      const double b = rng.normal();
      eta[l] = std::complex<double>(a * sqrt_lambda_[l], b * sqrt_lambda_[l]);
    }
    thread_local Eigen::FFT<double> fft;
    fft.fwd(w, eta);
    out.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.values[j] = w[j].real();
  }
  return out;
}

FieldSample sample_field(const DyadicGrid& grid, ScaleParameter eps, std::uint64_t seed,
                         SamplingMethod method) {
  SamplerOptions opts;
  opts.method = method;
  return FieldSampler(grid, eps, opts).sample(seed);
}

double sample_coarse_gaussian(double interval_length, std::uint64_t seed) {
  if (!(interval_length > 0.0) || interval_length >= 1.0)
    throw InvalidScaleError("coarse gaussian needs 0 < |I| < 1");
  CounterRng rng(seed, tag::kCoarse, 0);
  return rng.normal() * std::sqrt(2.0 * std::log(1.0 / interval_length));
}

void write_field(const FieldSample& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  const std::uint64_t header[4] = {static_cast<std::uint64_t>(f.grid.resolution),
                                   static_cast<std::uint64_t>(f.epsilon.log2_inv), f.seed,
                                   f.method == SamplingMethod::kCirculant ? 1ull : 0ull};
  os.write(reinterpret_cast<const char*>(header), sizeof(header));
  os.write(reinterpret_cast<const char*>(&f.clip_magnitude), sizeof(double));
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!os) throw Error("short write to " + path);
}

FieldSample read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  std::uint64_t header[4];
  double clip = 0.0;
  is.read(reinterpret_cast<char*>(header), sizeof(header));
  is.read(reinterpret_cast<char*>(&clip), sizeof(double));
  if (!is) throw Error("truncated field dump: " + path);
  FieldSample f{DyadicGrid(static_cast<int>(header[0])),
                ScaleParameter(static_cast<int>(header[1])),
                {},
                header[2],
                header[3] == 1 ? SamplingMethod::kCirculant : SamplingMethod::kDense,
                clip,
                0.0};
  f.values.resize(f.grid.size());
  is.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!is) throw Error("truncated field dump: " + path);
  return f;
}

}  // namespace gmclab
