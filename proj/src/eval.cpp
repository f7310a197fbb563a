#include "ridgeguard/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "ridgeguard/error.hpp"
#include "ridgeguard/matcher.hpp"
#include "ridgeguard/parallel.hpp"
#include "ridgeguard/pipeline.hpp"
#include "ridgeguard/projection.hpp"
#include "ridgeguard/rng.hpp"

namespace ridgeguard {

std::string_view to_string(Protocol p) { return p == Protocol::fvc ? "fvc" : "1vs1"; }

std::string_view to_string(KeyPolicy k) {
  return k == KeyPolicy::same_key ? "same" : "per-user";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "fvc" || name == "FVC") return Protocol::fvc;
  if (name == "1vs1" || name == "1VS1" || name == "onevsone") return Protocol::one_vs_one;
  throw ValidationError("unknown protocol '" + std::string(name) + "' (expected fvc or 1vs1)");
}

KeyPolicy parse_key_policy(std::string_view name) {
  if (name == "same" || name == "same_key" || name == "same-key") return KeyPolicy::same_key;
  if (name == "per-user" || name == "per_user" || name == "per_user_key" || name == "per-user-key")
    return KeyPolicy::per_user_key;
  throw ValidationError("unknown key policy '" + std::string(name) +
                        "' (expected same or per-user)");
}

std::vector<ComparisonPair> pair_protocol(std::span<const std::size_t> impressions_per_subject,
                                          Protocol protocol) {
  const std::size_t n = impressions_per_subject.size();
  if (n < 2) throw ValidationError("insufficient subjects: need at least 2, got " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (impressions_per_subject[i] < 2)
      throw ValidationError("insufficient impressions: subject " + std::to_string(i) + " has " +
                            std::to_string(impressions_per_subject[i]) + ", need at least 2");
  }
  std::vector<ComparisonPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    if (protocol == Protocol::fvc) {
      const std::size_t m = impressions_per_subject[i];
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) pairs.push_back({{i, a}, {i, b}, true});
    } else {
      pairs.push_back({{i, 0}, {i, 1}, true});
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({{i, 0}, {j, 0}, false});
  return pairs;
}

std::vector<ComparisonPair> pair_protocol(std::size_t n_subjects, std::size_t n_impressions,
                                          Protocol protocol) {
  const std::vector<std::size_t> shape(n_subjects, n_impressions);
  return pair_protocol(shape, protocol);
}

// ---------------------------------------------------------------------------

namespace {

// Share of values >= th, values sorted ascending.
double share_at_least(const std::vector<double>& sorted, double th) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), th);
  return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

double share_below(const std::vector<double>& sorted, double th) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), th);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

}  // namespace

double fmr_at(std::span<const double> imposter, double threshold) {
  if (imposter.empty()) throw ValidationError("empty imposter score list");
  const auto hits = std::count_if(imposter.begin(), imposter.end(),
                                  [&](double v) { return v >= threshold; });
  return static_cast<double>(hits) / static_cast<double>(imposter.size());
}

EvalReport compute_eer(std::span<const double> genuine, std::span<const double> imposter) {
  if (genuine.empty()) throw ValidationError("empty genuine score list");
  if (imposter.empty()) throw ValidationError("empty imposter score list");
  std::vector<double> gen(genuine.begin(), genuine.end());
  std::vector<double> imp(imposter.begin(), imposter.end());
  for (double v : gen)
    if (!std::isfinite(v)) throw ValidationError("non-finite genuine score");
  for (double v : imp)
    if (!std::isfinite(v)) throw ValidationError("non-finite imposter score");
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());

  std::vector<double> all = gen;
  all.insert(all.end(), imp.begin(), imp.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<double> grid;
  grid.reserve(all.size() * 2 + 1);
  for (std::size_t i = 0; i < all.size(); ++i) {
    grid.push_back(all[i]);
    if (i + 1 < all.size()) grid.push_back(0.5 * (all[i] + all[i + 1]));
  }
  // Above the maximum nothing is accepted; it closes the sweep at FMR 0, FNMR 1.
  grid.push_back(std::nextafter(all.back(), std::numeric_limits<double>::infinity()));

  EvalReport r;
  r.genuine_count = gen.size();
  r.imposter_count = imp.size();
  r.curve.reserve(grid.size());
  for (double th : grid) r.curve.push_back({th, share_at_least(imp, th), share_below(gen, th)});

  // At the lowest score FNMR = 0 and FMR > 0, and at the sentinel FMR = 0 and
  // FNMR = 1, so a sign change always exists.
  std::size_t k = 0;
  while (k < r.curve.size() && r.curve[k].fmr - r.curve[k].fnmr > 0.0) ++k;
  const auto& hi = r.curve[k];
  const double dh = hi.fmr - hi.fnmr;
  if (dh == 0.0 || k == 0) {
    r.eer = hi.fmr;
    r.eer_threshold = hi.threshold;
  } else {
    const auto& lo = r.curve[k - 1];
    const double dl = lo.fmr - lo.fnmr;  // > 0
    const double w = dl / (dl - dh);
    r.eer = lo.fmr + w * (hi.fmr - lo.fmr);
    r.eer_threshold = lo.threshold + w * (hi.threshold - lo.threshold);
  }

  auto at_target = [&](const std::string& name, double target) {
    for (const auto& p : r.curve) {
      if (p.fmr <= target) return OperatingPoint{name, p.threshold, p.fmr, 1.0 - p.fnmr};
    }
    const auto& last = r.curve.back();
    return OperatingPoint{name, last.threshold, last.fmr, 1.0 - last.fnmr};
  };
  r.operating_points.push_back(at_target("fmr_1pct", 0.01));
  r.operating_points.push_back(at_target("fmr_0.1pct", 0.001));
  r.operating_points.push_back(
      {"eer", r.eer_threshold, fmr_at(imp, r.eer_threshold),
       1.0 - share_below(gen, r.eer_threshold)});
  return r;
}

EvalReport compute_eer(const ScoreSet& scores) { return compute_eer(scores.genuine, scores.imposter); }

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of an empty list");
  std::sort(values.begin(), values.end());
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double f = pos - static_cast<double>(lo);
  return values[lo] + f * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

// ---------------------------------------------------------------------------

FeatureSet extract_dataset_features(const Dataset& dataset, int s, double b,
                                    const CrossingOptions& options, unsigned workers) {
  Params::with_sectors(s, b).validate();
  FeatureSet fs;
  fs.s = s;
  fs.b = b;
  std::vector<ImpressionRef> refs;
  fs.lt.resize(dataset.subjects.size());
  for (std::size_t i = 0; i < dataset.subjects.size(); ++i) {
    fs.lt[i].resize(dataset.subjects[i].impressions.size());
    for (std::size_t k = 0; k < dataset.subjects[i].impressions.size(); ++k) refs.push_back({i, k});
  }
  parallel_for(refs.size(), workers, [&](std::size_t idx) {
    const auto [i, k] = refs[idx];
    const auto& subject = dataset.subjects[i];
    const auto& imp = subject.impressions[k];
    try {
      fs.lt[i][k] = compute_log_template(imp.minutiae, imp.skeleton, s, b, options);
    } catch (const std::exception& e) {
      const std::string name = imp.minutiae.impression_id.empty() ? std::to_string(k + 1)
                                                                 : imp.minutiae.impression_id;
      throw Error("subject " + subject.id + " impression " + name + ": " + e.what());
    }
  });
  return fs;
}

std::uint64_t subject_key_seed(std::uint64_t master_seed, KeyPolicy policy, std::size_t subject) {
  if (policy == KeyPolicy::same_key) return master_seed;
  return derive_seed(master_seed, static_cast<std::uint64_t>(subject) + 1);
}

std::uint64_t trial_seed(std::uint64_t master_seed, int trial) {
  return derive_seed(master_seed ^ 0x747269616cULL, static_cast<std::uint64_t>(trial));
}

ScoreSet score_features(const FeatureSet& features, const ScenarioConfig& config) {
  Params params = config.params;
  params.s = features.s;
  params.b = features.b;
  params.validate();

  std::vector<std::size_t> shape;
  for (const auto& row : features.lt) shape.push_back(row.size());
  auto pairs = pair_protocol(shape, config.protocol);

  // One projection per impression actually used; enrolled and query sides of
  // every pair carry their own subject's key.
  const std::size_t n_subjects = features.lt.size();
  std::vector<std::vector<Matrix>> ct(n_subjects);
  std::vector<std::vector<char>> needed(n_subjects);
  for (std::size_t i = 0; i < n_subjects; ++i) {
    ct[i].resize(shape[i]);
    needed[i].assign(shape[i], 0);
  }
  for (const auto& p : pairs) {
    needed[p.enrolled.subject][p.enrolled.impression] = 1;
    needed[p.query.subject][p.query.impression] = 1;
  }

  Matrix shared_rp;
  if (config.key_policy == KeyPolicy::same_key)
    shared_rp = generate_rp(ProjectionKey::make(config.master_seed, params.s, params.t, params.b)).rp;

  parallel_for(n_subjects, config.workers, [&](std::size_t i) {
    Matrix rp = shared_rp;
    if (config.key_policy == KeyPolicy::per_user_key) {
      const auto seed = subject_key_seed(config.master_seed, config.key_policy, i);
      rp = generate_rp(ProjectionKey::make(seed, params.s, params.t, params.b)).rp;
    }
    for (std::size_t k = 0; k < shape[i]; ++k) {
      if (needed[i][k]) ct[i][k] = project(features.lt[i][k].lt, rp);
    }
  });

  ScoreSet out;
  out.protocol = config.protocol;
  out.key_policy = config.key_policy;
  out.params = params;
  out.seed = config.master_seed;
  out.scores.assign(pairs.size(), 0.0);
  parallel_for(pairs.size(), config.workers, [&](std::size_t idx) {
    const auto& p = pairs[idx];
    try {
      out.scores[idx] = match_score(ct[p.enrolled.subject][p.enrolled.impression],
                                    ct[p.query.subject][p.query.impression]);
    } catch (const std::exception& e) {
      throw Error("pair (" + std::to_string(p.enrolled.subject) + ":" +
                  std::to_string(p.enrolled.impression) + ", " + std::to_string(p.query.subject) +
                  ":" + std::to_string(p.query.impression) + "): " + e.what());
    }
  });
  for (std::size_t idx = 0; idx < pairs.size(); ++idx)
    (pairs[idx].genuine ? out.genuine : out.imposter).push_back(out.scores[idx]);
  out.pairs = std::move(pairs);
  return out;
}

ScoreSet run_scenario(const Dataset& dataset, const ScenarioConfig& config) {
  const auto features = extract_dataset_features(dataset, config.params.s, config.params.b,
                                                 config.crossing, config.workers);
  return score_features(features, config);
}

std::vector<ScoreSet> run_trials(const FeatureSet& features, const ScenarioConfig& config,
                                 int trials) {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  std::vector<ScoreSet> out;
  out.reserve(static_cast<std::size_t>(trials));
  for (int k = 0; k < trials; ++k) {
    ScenarioConfig c = config;
    c.master_seed = trial_seed(config.master_seed, k);
    out.push_back(score_features(features, c));
  }
  return out;
}

// ---------------------------------------------------------------------------

RevocabilityReport revocability_experiment(const LogTemplate& lt, const Params& params,
                                           std::span<const std::uint64_t> key_seeds,
                                           double threshold) {
  if (key_seeds.size() < 2) throw ValidationError("revocability needs at least 2 keys");
  params.validate();
  auto ct_for = [&](std::uint64_t seed) {
    return project(lt.lt, generate_rp(ProjectionKey::make(seed, params.s, params.t, params.b)).rp);
  };
  const Matrix enrolled = ct_for(key_seeds[0]);
  RevocabilityReport r;
  r.n_keys = key_seeds.size() - 1;
  r.threshold = threshold;
  r.scores.reserve(r.n_keys);
  for (std::size_t k = 1; k < key_seeds.size(); ++k)
    r.scores.push_back(match_score(enrolled, ct_for(key_seeds[k])));
  const double n = static_cast<double>(r.scores.size());
  r.mean = std::accumulate(r.scores.begin(), r.scores.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : r.scores) ss += (v - r.mean) * (v - r.mean);
  r.variance = ss / n;
  r.fmr = fmr_at(r.scores, threshold);
  r.revocability = 1.0 - r.fmr;
  return r;
}

RevocabilityReport revocability_experiment(const LogTemplate& lt, const Params& params,
                                           std::uint64_t base_seed, int n_keys, double threshold) {
  if (n_keys < 1) throw ValidationError("revocability needs at least 1 re-enrollment key");
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k <= n_keys; ++k) seeds.push_back(derive_seed(base_seed, static_cast<std::uint64_t>(k)));
  return revocability_experiment(lt, params, seeds, threshold);
}

std::vector<SweepRow> parameter_sweep(const Dataset& dataset, std::span<const int> s_values,
                                      std::span<const double> b_values,
                                      const ScenarioConfig& base, int trials) {
  if (s_values.empty() || b_values.empty()) throw ValidationError("sweep value lists must be non-empty");
  if (dataset.subjects.size() < 2)
    throw ValidationError("insufficient subjects: need at least 2, got " +
                          std::to_string(dataset.subjects.size()));
  std::vector<SweepRow> rows;
  for (int s : s_values) {
    for (double b : b_values) {
      ScenarioConfig c = base;
      c.params = Params::with_sectors(s, b);
      const auto fs = extract_dataset_features(dataset, s, b, c.crossing, c.workers);
      const auto sets = run_trials(fs, c, trials);
      double sum = 0.0;
      for (const auto& set : sets) sum += compute_eer(set).eer;
      rows.push_back({s, b, c.params.t, sum / static_cast<double>(sets.size())});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string curve_csv(const EvalReport& report) {
  std::string out = "threshold,fmr,fnmr\n";
  for (const auto& p : report.curve)
    out += format_number(p.threshold) + "," + format_number(p.fmr) + "," + format_number(p.fnmr) + "\n";
  return out;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "s,b,t,eer\n";
  for (const auto& r : rows)
    out += std::to_string(r.s) + "," + format_number(r.b) + "," + std::to_string(r.t) + "," +
           format_number(r.eer) + "\n";
  return out;
}

std::string scores_csv(std::span<const ScoreSet> trials, const Dataset& dataset) {
  auto name = [&](const ImpressionRef& r) {
    const auto& subj = dataset.subjects.at(r.subject);
    const auto& id = subj.impressions.at(r.impression).minutiae.impression_id;
    return subj.id + "/" + (id.empty() ? std::to_string(r.impression + 1) : id);
  };
  std::string out = "trial,label,enrolled,query,score\n";
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const auto& set = trials[t];
    for (std::size_t i = 0; i < set.pairs.size(); ++i) {
      const auto& p = set.pairs[i];
      out += std::to_string(t) + "," + (p.genuine ? "genuine" : "imposter") + "," + name(p.enrolled) +
             "," + name(p.query) + "," + format_number(set.scores[i]) + "\n";
    }
  }
  return out;
}

std::string summary_json(std::span<const ScoreSet> trials, std::span<const EvalReport> reports) {
  if (trials.empty() || trials.size() != reports.size())
    throw ValidationError("summary needs one report per trial");
  nlohmann::ordered_json j;
  double eer_sum = 0.0, thr_sum = 0.0;
  nlohmann::ordered_json per_trial = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    eer_sum += r.eer;
    thr_sum += r.eer_threshold;
    per_trial.push_back(r.eer);
  }
  const double n = static_cast<double>(reports.size());
  const auto& first = trials.front();
  std::vector<double> gen_all, imp_all;
  for (const auto& t : trials) {
    gen_all.insert(gen_all.end(), t.genuine.begin(), t.genuine.end());
    imp_all.insert(imp_all.end(), t.imposter.begin(), t.imposter.end());
  }
  j["eer"] = eer_sum / n;
  j["eer_per_trial"] = per_trial;
  j["eer_threshold"] = thr_sum / n;
  j["counts"] = {{"genuine", first.genuine.size()}, {"imposter", first.imposter.size()}};
  j["params"] = {{"s", first.params.s}, {"b", first.params.b}, {"t", first.params.t}};
  j["protocol"] = std::string(to_string(first.protocol));
  j["key_policy"] = std::string(to_string(first.key_policy));
  j["trials"] = trials.size();
  j["median_genuine"] = median(gen_all);
  j["median_imposter"] = median(imp_all);
  nlohmann::ordered_json ops = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < reports.front().operating_points.size(); ++k) {
    double thr = 0.0, fmr = 0.0, gmr = 0.0;
    for (const auto& r : reports) {
      thr += r.operating_points[k].threshold;
      fmr += r.operating_points[k].fmr;
      gmr += r.operating_points[k].gmr;
    }
    ops.push_back({{"name", reports.front().operating_points[k].name},
                   {"threshold", thr / n},
                   {"fmr", fmr / n},
                   {"gmr", gmr / n}});
  }
  j["operating_points"] = ops;
  return j.dump(2) + "\n";
}

}  // namespace ridgeguard
