#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ridgeguard/encode.hpp"
#include "ridgeguard/types.hpp"

namespace ridgeguard {

/// Tag of the generator behind generate_rp; part of every key id, so a change
/// in generator invalidates old keys instead of silently producing new ones.
inline constexpr std::string_view kRngVersion = "sm64bm1";

/// Secret projection key. The seed never leaves the key file; templates only
/// carry `key_id`.
struct ProjectionKey {
  std::uint64_t seed = 0;
  int s = 8;
  int t = 4;
  double b = 1.2;
  std::string key_id;

  /// Builds a key with its id filled in. Throws ValidationError if t >= s.
  static ProjectionKey make(std::uint64_t seed, int s, int t, double b = 1.2);
  Params params() const { return Params{s, b, t}; }
};

/// `<rng version>:<first 24 hex digits of SHA-256 over version, seed, s, t>`.
std::string compute_key_id(std::uint64_t seed, int s, int t);

std::string serialize_key(const ProjectionKey& key);
ProjectionKey deserialize_key(std::string_view json_text);

struct ProjectionMatrix {
  Matrix rp;  // s x t
  std::string key_id;
};

/// s x t matrix of i.i.d. N(0, 1) entries, filled row-major from the key's
/// counter stream (entry pair k takes words 2k, 2k + 1 through Box-Muller).
ProjectionMatrix generate_rp(const ProjectionKey& key);

/// CT = LT * RP, accumulated term by term in index order.
Matrix project(const Matrix& lt, const Matrix& rp);
/// Full template: CT plus the key id and the (s, b, t) echo.
ProtectedTemplate project(const LogTemplate& lt, const ProjectionMatrix& rp);

/// Numerical rank: singular values above 1e-10 times the largest.
int rank_of(const Matrix& m);

/// Minimum-norm preimage CT * pinv(RP), i.e. what an attacker holding both
/// the template and the matrix recovers.
Matrix pseudo_inverse_attack(const Matrix& ct, const Matrix& rp);

/// Orthonormal basis (as rows) of {z : z * RP = 0}; it has s - rank(RP) rows.
Matrix left_null_space(const Matrix& rp);

struct EntryStats {
  double mean = 0.0;
  double variance = 0.0;
};

/// Empirical moments of W = RP^T RP and W' = RP RP^T over a key sample.
struct GramReport {
  int s = 0;
  int t = 0;
  std::size_t samples = 0;
  bool normalized = true;
  // Per-entry moments, row-major t x t and s x s.
  std::vector<EntryStats> w;
  std::vector<EntryStats> w_prime;

  // Averages over the diagonal / off-diagonal entries.
  EntryStats w_diag, w_off, wp_diag, wp_off;

  // Bands: |E w_ii - 1| <= 0.05, |E w_ij| <= 0.05, Var w_ii within 2/s +-50%,
  // Var w_ij within 1/s +-50%, E w'_ii within t/s +- 0.05. Every entry is
  // checked, not just the averages.
  bool w_diag_mean_ok = false;
  bool w_off_mean_ok = false;
  bool w_diag_var_ok = false;
  bool w_off_var_ok = false;
  bool wp_diag_mean_ok = false;
  bool within_bands() const {
    return w_diag_mean_ok && w_off_mean_ok && w_diag_var_ok && w_off_var_ok && wp_diag_mean_ok;
  }
};

/// With `normalize`, each RP is scaled by 1/sqrt(s) so entries have variance
/// 1/s before the Gram products are taken. Needs at least 100 keys, all of
/// the same shape.
GramReport gram_statistics(const std::vector<ProjectionKey>& keys, bool normalize = true);

}  // namespace ridgeguard
