#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ridgeguard/dataset.hpp"
#include "ridgeguard/encode.hpp"
#include "ridgeguard/ridge_features.hpp"
#include "ridgeguard/types.hpp"

namespace ridgeguard {

enum class Protocol { fvc, one_vs_one };
enum class KeyPolicy { same_key, per_user_key };

std::string_view to_string(Protocol p);
std::string_view to_string(KeyPolicy k);
Protocol parse_protocol(std::string_view name);   // "fvc" | "1vs1"
KeyPolicy parse_key_policy(std::string_view name);  // "same" | "per-user"

struct ImpressionRef {
  std::size_t subject = 0;
  std::size_t impression = 0;

  friend bool operator==(const ImpressionRef&, const ImpressionRef&) = default;
};

struct ComparisonPair {
  ImpressionRef enrolled;
  ImpressionRef query;
  bool genuine = false;
};

/// Genuine pairs first (subject order), then imposter pairs.
///
/// FVC: every pair of impressions within a subject; 1VS1: first against
/// second impression. Imposters, both protocols: first impression of every
/// pair of subjects. Throws ValidationError with fewer than two subjects or a
/// subject with fewer than two impressions.
std::vector<ComparisonPair> pair_protocol(std::span<const std::size_t> impressions_per_subject,
                                          Protocol protocol);
std::vector<ComparisonPair> pair_protocol(std::size_t n_subjects, std::size_t n_impressions,
                                          Protocol protocol);

struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> imposter;
  Protocol protocol = Protocol::fvc;
  KeyPolicy key_policy = KeyPolicy::same_key;
  Params params;
  std::uint64_t seed = 0;
  /// All scored pairs with their scores, in pair_protocol order.
  std::vector<ComparisonPair> pairs;
  std::vector<double> scores;
};

struct CurvePoint {
  double threshold = 0.0;
  double fmr = 0.0;
  double fnmr = 0.0;
};

struct OperatingPoint {
  std::string name;
  double threshold = 0.0;
  double fmr = 0.0;
  double gmr = 0.0;
};

struct EvalReport {
  double eer = 0.0;
  double eer_threshold = 0.0;
  std::vector<CurvePoint> curve;
  std::vector<OperatingPoint> operating_points;
  std::size_t genuine_count = 0;
  std::size_t imposter_count = 0;
};

/// FMR(th) = share of imposters >= th, FNMR(th) = share of genuines < th,
/// swept over every observed score, the midpoints between neighbours and one
/// threshold just above the maximum. The EER is read off by linear
/// interpolation between the two sweep thresholds where FMR - FNMR changes
/// sign. Operating points: GMR at FMR <= 1%, FMR <= 0.1%, and at the EER.
EvalReport compute_eer(std::span<const double> genuine, std::span<const double> imposter);
EvalReport compute_eer(const ScoreSet& scores);

/// FMR at a fixed threshold.
double fmr_at(std::span<const double> imposter, double threshold);

/// Score quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

/// Log templates of every impression for one (s, b); key independent, so
/// they are computed once and reused across keys and trials.
struct FeatureSet {
  int s = 8;
  double b = 1.2;
  std::vector<std::vector<LogTemplate>> lt;  // [subject][impression]
};

FeatureSet extract_dataset_features(const Dataset& dataset, int s, double b,
                                    const CrossingOptions& options = {}, unsigned workers = 0);

struct ScenarioConfig {
  Params params;
  KeyPolicy key_policy = KeyPolicy::same_key;
  Protocol protocol = Protocol::fvc;
  std::uint64_t master_seed = 1;
  CrossingOptions crossing;
  unsigned workers = 0;
};

/// Key seed a subject's templates are projected with.
std::uint64_t subject_key_seed(std::uint64_t master_seed, KeyPolicy policy, std::size_t subject);
/// Master seed of trial k.
std::uint64_t trial_seed(std::uint64_t master_seed, int trial);

ScoreSet score_features(const FeatureSet& features, const ScenarioConfig& config);
ScoreSet run_scenario(const Dataset& dataset, const ScenarioConfig& config);
/// Trial k uses master seed trial_seed(config.master_seed, k).
std::vector<ScoreSet> run_trials(const FeatureSet& features, const ScenarioConfig& config, int trials);

struct RevocabilityReport {
  std::size_t n_keys = 0;
  double threshold = 0.0;
  std::vector<double> scores;  // pseudo-imposter, one per re-enrollment
  double mean = 0.0;
  double variance = 0.0;
  double fmr = 0.0;
  double revocability = 0.0;  // 1 - fmr
};

/// Enrolls `lt` under key_seeds[0] and compares it against re-enrollments of
/// the same log template under each remaining seed.
RevocabilityReport revocability_experiment(const LogTemplate& lt, const Params& params,
                                           std::span<const std::uint64_t> key_seeds,
                                           double threshold);
/// n_keys re-enrollments under seeds derived from `base_seed`.
RevocabilityReport revocability_experiment(const LogTemplate& lt, const Params& params,
                                           std::uint64_t base_seed, int n_keys, double threshold);

struct SweepRow {
  int s = 0;
  double b = 0.0;
  int t = 0;
  double eer = 0.0;  // mean over trials
};

/// EER for every (s, b) combination, t = s / 2. Throws ValidationError on
/// datasets with fewer than two subjects or empty value lists.
std::vector<SweepRow> parameter_sweep(const Dataset& dataset, std::span<const int> s_values,
                                      std::span<const double> b_values,
                                      const ScenarioConfig& base, int trials = 1);

std::string format_number(double v);
std::string curve_csv(const EvalReport& report);
std::string sweep_csv(std::span<const SweepRow> rows);
/// trial,label,enrolled,query,score. Names come from the dataset.
std::string scores_csv(std::span<const ScoreSet> trials, const Dataset& dataset);
/// {eer, eer_per_trial, eer_threshold, counts, params, protocol, key_policy,
/// trials, operating_points} for a multi-trial run.
std::string summary_json(std::span<const ScoreSet> trials, std::span<const EvalReport> reports);

}  // namespace ridgeguard
