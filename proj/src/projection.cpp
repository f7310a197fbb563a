#include "ridgeguard/projection.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/SVD>
#include <json.hpp>
#include <openssl/evp.h>

#include "ridgeguard/error.hpp"
#include "ridgeguard/rng.hpp"

namespace ridgeguard {
namespace {

constexpr double kRankTolerance = 1e-10;

Eigen::JacobiSVD<Matrix> svd_of(const Matrix& m, unsigned options) {
  return Eigen::JacobiSVD<Matrix>(m, options);
}

int rank_from(const Eigen::VectorXd& singular) {
  if (singular.size() == 0) return 0;
  const double cutoff = kRankTolerance * singular(0);
  int r = 0;
  for (Eigen::Index i = 0; i < singular.size(); ++i)
    if (singular(i) > cutoff) ++r;
  return r;
}

void check_key_shape(int s, int t) {
  if (s < 2) throw ValidationError("s must be >= 2");
  if (t < 1) throw ValidationError("t must be >= 1");
  if (t >= s) throw ValidationError("t must be < s");
}

}  // namespace

std::string compute_key_id(std::uint64_t seed, int s, int t) {
  const std::string material = std::string(kRngVersion) + "|" + std::to_string(seed) + "|" +
                               std::to_string(s) + "|" + std::to_string(t);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(material.data(), material.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < 12 && i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return std::string(kRngVersion) + ":" + hex;
}

ProjectionKey ProjectionKey::make(std::uint64_t seed, int s, int t, double b) {
  check_key_shape(s, t);
  if (!(b > 1.0)) throw ValidationError("b must be > 1");
  return ProjectionKey{seed, s, t, b, compute_key_id(seed, s, t)};
}

std::string serialize_key(const ProjectionKey& key) {
  nlohmann::ordered_json j;
  j["seed"] = key.seed;
  j["s"] = key.s;
  j["t"] = key.t;
  j["b"] = key.b;
  j["key_id"] = key.key_id;
  j["rng_version"] = std::string(kRngVersion);
  return j.dump(2) + "\n";
}

ProjectionKey deserialize_key(std::string_view json_text) {
  try {
    auto j = nlohmann::json::parse(json_text);
    if (j.at("rng_version").get<std::string>() != kRngVersion) {
      throw FormatError("key was made with generator " + j.at("rng_version").get<std::string>());
    }
    auto key = ProjectionKey::make(j.at("seed").get<std::uint64_t>(), j.at("s").get<int>(),
                                   j.at("t").get<int>(), j.at("b").get<double>());
    if (j.at("key_id").get<std::string>() != key.key_id) {
      throw FormatError("key_id does not match the key material");
    }
    return key;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed key file: ") + e.what());
  }
}

ProjectionMatrix generate_rp(const ProjectionKey& key) {
  check_key_shape(key.s, key.t);
  const CounterStream stream(key.seed);
  ProjectionMatrix out{Matrix(key.s, key.t), key.key_id.empty()
                                                  ? compute_key_id(key.seed, key.s, key.t)
                                                  : key.key_id};
  const auto total = static_cast<std::uint64_t>(key.s) * static_cast<std::uint64_t>(key.t);
  for (std::uint64_t k = 0; k < total; k += 2) {
    double z0, z1;
    CounterStream::box_muller(stream.at(k), stream.at(k + 1), z0, z1);
    out.rp(static_cast<Eigen::Index>(k / key.t), static_cast<Eigen::Index>(k % key.t)) = z0;
    if (k + 1 < total) {
      out.rp(static_cast<Eigen::Index>((k + 1) / key.t),
             static_cast<Eigen::Index>((k + 1) % key.t)) = z1;
    }
  }
  return out;
}

Matrix project(const Matrix& lt, const Matrix& rp) {
  if (lt.cols() != rp.rows()) {
    throw DimensionError("log template has " + std::to_string(lt.cols()) +
                         " columns, projection matrix " + std::to_string(rp.rows()) + " rows");
  }
  Matrix ct(lt.rows(), rp.cols());
  for (Eigen::Index i = 0; i < lt.rows(); ++i)
    for (Eigen::Index j = 0; j < rp.cols(); ++j) {
      double sum = 0.0;
      for (Eigen::Index k = 0; k < lt.cols(); ++k) sum += lt(i, k) * rp(k, j);
      ct(i, j) = sum;
    }
  return ct;
}

ProtectedTemplate project(const LogTemplate& lt, const ProjectionMatrix& rp) {
  ProtectedTemplate tpl;
  tpl.ct = project(lt.lt, rp.rp);
  tpl.key_id = rp.key_id;
  tpl.params = Params{static_cast<int>(rp.rp.rows()), lt.b, static_cast<int>(rp.rp.cols())};
  return tpl;
}

int rank_of(const Matrix& m) {
  if (m.size() == 0) return 0;
  return rank_from(svd_of(m, 0).singularValues());
}

Matrix pseudo_inverse_attack(const Matrix& ct, const Matrix& rp) {
  if (ct.cols() != rp.cols()) throw DimensionError("template and matrix disagree on t");
  auto svd = svd_of(rp, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const int r = rank_from(sv);
  // pinv(RP) = V diag(1/sigma) U^T over the retained singular values.
  Matrix pinv = Matrix::Zero(rp.cols(), rp.rows());
  for (int k = 0; k < r; ++k) {
    pinv += (svd.matrixV().col(k) / sv(k)) * svd.matrixU().col(k).transpose();
  }
  return ct * pinv;
}

Matrix left_null_space(const Matrix& rp) {
  auto svd = svd_of(rp, Eigen::ComputeFullU);
  const int r = rank_from(svd.singularValues());
  const Eigen::Index extra = rp.rows() - r;
  return svd.matrixU().rightCols(extra).transpose();
}

GramReport gram_statistics(const std::vector<ProjectionKey>& keys, bool normalize) {
  if (keys.size() < 100) throw ValidationError("gram statistics need at least 100 keys");
  const int s = keys.front().s;
  const int t = keys.front().t;
  GramReport report;
  report.s = s;
  report.t = t;
  report.samples = keys.size();
  report.normalized = normalize;

  const auto tt = static_cast<std::size_t>(t) * t;
  const auto ss = static_cast<std::size_t>(s) * s;
  std::vector<double> sum_w(tt, 0.0), sq_w(tt, 0.0), sum_p(ss, 0.0), sq_p(ss, 0.0);
  const double scale = normalize ? 1.0 / std::sqrt(static_cast<double>(s)) : 1.0;

  for (const auto& key : keys) {
    if (key.s != s || key.t != t) throw DimensionError("gram sample mixes key shapes");
    const Matrix rp = generate_rp(key).rp * scale;
    const Matrix w = rp.transpose() * rp;
    const Matrix wp = rp * rp.transpose();
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < t; ++j) {
        sum_w[static_cast<std::size_t>(i * t + j)] += w(i, j);
        sq_w[static_cast<std::size_t>(i * t + j)] += w(i, j) * w(i, j);
      }
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) {
        sum_p[static_cast<std::size_t>(i * s + j)] += wp(i, j);
        sq_p[static_cast<std::size_t>(i * s + j)] += wp(i, j) * wp(i, j);
      }
  }

  const double n = static_cast<double>(keys.size());
  auto moments = [n](double sum, double sq) {
    const double mean = sum / n;
    return EntryStats{mean, (sq - n * mean * mean) / (n - 1.0)};
  };
  auto average = [](const std::vector<EntryStats>& v, int dim, bool diagonal) {
    EntryStats acc;
    int count = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        if ((i == j) == diagonal) {
          acc.mean += v[static_cast<std::size_t>(i * dim + j)].mean;
          acc.variance += v[static_cast<std::size_t>(i * dim + j)].variance;
          ++count;
        }
    if (count > 0) {
      acc.mean /= count;
      acc.variance /= count;
    }
    return acc;
  };

  for (std::size_t k = 0; k < tt; ++k) report.w.push_back(moments(sum_w[k], sq_w[k]));
  for (std::size_t k = 0; k < ss; ++k) report.w_prime.push_back(moments(sum_p[k], sq_p[k]));
  report.w_diag = average(report.w, t, true);
  report.w_off = average(report.w, t, false);
  report.wp_diag = average(report.w_prime, s, true);
  report.wp_off = average(report.w_prime, s, false);

  // Expected values below assume the 1/sqrt(s) scaling.
  const double inv_s = 1.0 / s;
  report.w_diag_mean_ok = report.w_off_mean_ok = report.w_diag_var_ok = report.w_off_var_ok =
      report.wp_diag_mean_ok = true;
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j) {
      const auto& e = report.w[static_cast<std::size_t>(i * t + j)];
      if (i == j) {
        report.w_diag_mean_ok &= std::abs(e.mean - 1.0) <= 0.05;
        report.w_diag_var_ok &= std::abs(e.variance - 2.0 * inv_s) <= 0.5 * 2.0 * inv_s;
      } else {
        report.w_off_mean_ok &= std::abs(e.mean) <= 0.05;
        report.w_off_var_ok &= std::abs(e.variance - inv_s) <= 0.5 * inv_s;
      }
    }
  for (int i = 0; i < s; ++i) {
    const auto& e = report.w_prime[static_cast<std::size_t>(i * s + i)];
    report.wp_diag_mean_ok &= std::abs(e.mean - static_cast<double>(t) * inv_s) <= 0.05;
  }
  return report;
}

}  // namespace ridgeguard
