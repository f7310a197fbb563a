#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ridgeguard/dataset.hpp"
#include "ridgeguard/encode.hpp"
#include "ridgeguard/error.hpp"
#include "ridgeguard/eval.hpp"
#include "ridgeguard/io.hpp"
#include "ridgeguard/matcher.hpp"
#include "ridgeguard/pipeline.hpp"
#include "ridgeguard/projection.hpp"
#include "ridgeguard/rng.hpp"
#include "ridgeguard/synth.hpp"

namespace ridgeguard::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr int kExitReject = 1;
constexpr int kExitError = 2;

ProjectionKey load_key(const fs::path& path) { return deserialize_key(read_file(path)); }

// ---------------------------------------------------------------------------

struct KeygenArgs {
  std::uint64_t seed = 1;
  int s = 8;
  std::optional<int> t;
  double b = 1.2;
  std::string out;
};

int cmd_keygen(const KeygenArgs& a, std::ostream& out) {
  const int t = a.t ? *a.t : Params::with_sectors(a.s, a.b).t;
  const auto key = ProjectionKey::make(a.seed, a.s, t, a.b);
  const auto text = serialize_key(key);
  if (a.out.empty()) {
    out << text;
  } else {
    write_file(a.out, text);
  }
  out << key.key_id << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct EnrollArgs {
  std::string minutiae, skeleton, key, out;
};

int cmd_enroll(const EnrollArgs& a, std::ostream& out) {
  const auto key = load_key(a.key);
  const auto ms = load_minutiae(a.minutiae);
  if (ms.empty()) throw ValidationError("nothing to enroll: " + a.minutiae + " has no minutiae");
  const auto skel = load_skeleton(a.skeleton);
  const auto tpl = enroll(ms, skel, key);
  save_template(a.out, tpl);
  out << "enrolled n=" << tpl.rows() << " t=" << tpl.params.t << " key_id=" << tpl.key_id << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string tpl, minutiae, skeleton, key;
  double threshold = 0.65;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const auto stored = load_template(a.tpl);
  const auto key = load_key(a.key);
  if (key.key_id != stored.key_id) {
    throw ValidationError("key mismatch: template was made with " + stored.key_id + ", key is " +
                          key.key_id);
  }
  if (key.s != stored.params.s || key.t != stored.params.t) {
    throw ValidationError("key mismatch: template parameters differ from the key");
  }
  ProjectionKey k = key;
  k.b = stored.params.b;
  const auto query = enroll(load_minutiae(a.minutiae), load_skeleton(a.skeleton), k);
  const double score = match_score(stored, query);
  const bool accept = score >= a.threshold;
  out << "score " << format_number(score) << "\n";
  out << "threshold " << format_number(a.threshold) << "\n";
  out << (accept ? "accept" : "reject") << "\n";
  return accept ? 0 : kExitReject;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string dataset;
  std::string synthetic;
  int subjects = 100;
  int impressions = 4;
  std::uint64_t synth_seed = 1;
  std::uint64_t seed = 1;
  std::string protocol = "fvc";
  std::string key_policy = "same";
  int trials = 10;
  int s = 8;
  double b = 1.2;
  std::optional<int> t;
  std::vector<std::string> sweep;
  std::string out;
  std::string format = "json";
  unsigned workers = 0;
};

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    T v{};
    try {
      if constexpr (std::is_integral_v<T>) {
        v = static_cast<T>(std::stoi(item, &used));
      } else {
        v = std::stod(item, &used);
      }
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ValidationError("bad sweep value '" + item + "'");
    values.push_back(v);
  }
  if (values.empty()) throw ValidationError("empty sweep list '" + text + "'");
  return values;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  if (a.dataset.empty() == a.synthetic.empty())
    throw ValidationError("evaluate needs exactly one of --dataset or --synthetic");
  if (a.out.empty()) throw ValidationError("evaluate needs --out");

  Dataset data;
  if (!a.dataset.empty()) {
    data = load_dataset(a.dataset);
  } else {
    data = generate_population(a.synth_seed, a.subjects, a.impressions, synth_preset(a.synthetic));
  }

  ScenarioConfig config;
  config.params = Params::with_sectors(a.s, a.b);
  if (a.t) config.params.t = *a.t;
  config.params.validate();
  config.protocol = parse_protocol(a.protocol);
  config.key_policy = parse_key_policy(a.key_policy);
  config.master_seed = a.seed;
  config.workers = a.workers;

  // Validate the layout before any feature work.
  (void)pair_protocol(data.shape(), config.protocol);

  fs::create_directories(a.out);
  const fs::path dir(a.out);

  const auto features =
      extract_dataset_features(data, config.params.s, config.params.b, config.crossing, config.workers);
  const auto trials = run_trials(features, config, a.trials);
  std::vector<EvalReport> reports;
  std::vector<double> gen_all, imp_all;
  for (const auto& set : trials) {
    reports.push_back(compute_eer(set));
    gen_all.insert(gen_all.end(), set.genuine.begin(), set.genuine.end());
    imp_all.insert(imp_all.end(), set.imposter.begin(), set.imposter.end());
  }
  const auto summary = summary_json(trials, reports);
  const auto pooled = compute_eer(gen_all, imp_all);
  write_file(dir / "summary.json", summary);
  write_file(dir / "scores.csv", scores_csv(trials, data));
  write_file(dir / "curve.csv", curve_csv(pooled));

  if (!a.sweep.empty()) {
    std::vector<int> s_values{config.params.s};
    std::vector<double> b_values{config.params.b};
    for (const auto& spec : a.sweep) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) throw ValidationError("sweep must look like s=4,8 or b=1.1,1.2");
      const auto name = spec.substr(0, eq);
      const auto list = spec.substr(eq + 1);
      if (name == "s") {
        s_values = parse_list<int>(list);
      } else if (name == "b") {
        b_values = parse_list<double>(list);
      } else {
        throw ValidationError("unknown sweep parameter '" + name + "'");
      }
    }
    const auto rows = parameter_sweep(data, s_values, b_values, config, a.trials);
    write_file(dir / "sweep.csv", sweep_csv(rows));
  }

  if (a.format == "csv") {
    out << curve_csv(pooled);
  } else {
    out << summary;
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct DiagnoseArgs {
  std::string key, tpl, matrix, out;
  int samples = 1000;
};

Matrix matrix_from_json(const nlohmann::json& rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r == 0 ? 0 : static_cast<Eigen::Index>(rows.at(0).size());
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(rows.at(i).size()) != c)
      throw DimensionError("ragged matrix in fixture");
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows.at(i).at(j).get<double>();
  }
  return m;
}

ojson gram_json(const GramReport& g) {
  auto stats = [](const EntryStats& e) { return ojson{{"mean", e.mean}, {"variance", e.variance}}; };
  return ojson{{"samples", g.samples},
               {"s", g.s},
               {"t", g.t},
               {"w_diag", stats(g.w_diag)},
               {"w_off", stats(g.w_off)},
               {"w_prime_diag", stats(g.wp_diag)},
               {"w_prime_off", stats(g.wp_off)},
               {"within_bands", g.within_bands()}};
}

// LT with a planted left-null-space component: the part CT cannot see.
ojson non_recovery_demo(const Matrix& rp, std::uint64_t seed) {
  const auto s = rp.rows();
  CounterStream rng(derive_seed(seed, 0x5e1f));
  Matrix lt(1, s);
  for (Eigen::Index j = 0; j < s; ++j) lt(0, j) = rng.uniform(0.0, 50.0);
  const Matrix null = left_null_space(rp);
  ojson j;
  if (null.rows() == 0) {
    j["planted_null_component"] = false;
    j["note"] = "projection has full row rank; nothing is hidden";
    return j;
  }
  Matrix z = null.row(0);
  lt += 5.0 * z;
  const Matrix ct = project(lt, rp);
  const Matrix recovered = pseudo_inverse_attack(ct, rp);
  const double distance = (recovered - lt).norm();
  const double residual = (project(recovered, rp) - ct).norm();
  j["planted_null_component"] = true;
  j["distance"] = distance;
  j["relative_error"] = distance / lt.norm();
  j["ct_residual"] = residual;
  j["recovered"] = distance <= 0.1;
  return j;
}

ojson pairing_roundtrip(int limit) {
  std::int64_t checked = 0;
  bool ok = true;
  for (std::int64_t a = 0; a <= limit && ok; ++a)
    for (std::int64_t b = 0; b <= limit; ++b) {
      ++checked;
      if (cantor_unpair(cantor_pair(a, b)) != std::pair{a, b}) {
        ok = false;
        break;
      }
    }
  return ojson{{"range", limit}, {"checked", checked}, {"ok", ok}};
}

int cmd_diagnose(const DiagnoseArgs& a, std::ostream& out) {
  if (a.key.empty() && a.tpl.empty() && a.matrix.empty())
    throw ValidationError("diagnose needs --key, --template or --matrix");
  ojson report;
  std::optional<Matrix> rp;
  std::uint64_t seed = 0;

  if (!a.key.empty()) {
    const auto key = load_key(a.key);
    seed = key.seed;
    rp = generate_rp(key).rp;
    report["source"] = "key";
    report["key_id"] = key.key_id;
    report["params"] = {{"s", key.s}, {"b", key.b}, {"t", key.t}};
    std::vector<ProjectionKey> keys;
    keys.reserve(static_cast<std::size_t>(a.samples));
    for (int k = 0; k < a.samples; ++k)
      keys.push_back(ProjectionKey::make(derive_seed(key.seed, static_cast<std::uint64_t>(k) + 1), key.s,
                                         key.t, key.b));
    report["gram"] = gram_json(gram_statistics(keys));
  }
  if (!a.matrix.empty()) {
    const auto j = nlohmann::json::parse(read_file(a.matrix));
    if (j.contains("rp")) {
      rp = matrix_from_json(j.at("rp"));
    } else if (j.contains("rp_transposed")) {
      rp = Matrix(matrix_from_json(j.at("rp_transposed")).transpose());
    } else {
      throw FormatError("matrix fixture needs `rp` or `rp_transposed`");
    }
    report["source"] = "matrix";
    report["shape"] = {rp->rows(), rp->cols()};
  }
  if (!a.tpl.empty()) {
    const auto tpl = load_template(a.tpl);
    ojson t{{"key_id", tpl.key_id},
            {"n", tpl.rows()},
            {"params", {{"s", tpl.params.s}, {"b", tpl.params.b}, {"t", tpl.params.t}}},
            {"rank_ct", tpl.rows() == 0 ? 0 : rank_of(tpl.ct)}};
    report["template"] = t;
    if (!rp) {
      // Without the key, the self-test runs on a fresh matrix of the same shape.
      report["source"] = "template";
      rp = generate_rp(ProjectionKey::make(0x5e1f, tpl.params.s, tpl.params.t)).rp;
    }
  }

  report["rank"] = rank_of(*rp);
  report["rows"] = rp->rows();
  report["cols"] = rp->cols();
  report["non_recovery"] = non_recovery_demo(*rp, seed);
  report["inverse_pairing"] = pairing_roundtrip(200);

  const auto text = report.dump(2) + "\n";
  if (!a.out.empty()) write_file(a.out, text);
  out << text;
  return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string preset = "default";
  int subjects = 10;
  int impressions = 4;
  std::uint64_t seed = 1;
  std::optional<int> n_minutiae;
  std::optional<int> size;
  std::optional<double> period;
  std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  auto spec = synth_preset(a.preset);
  if (a.n_minutiae) spec.n_minutiae = *a.n_minutiae;
  if (a.size) spec.width = spec.height = *a.size;
  if (a.period) spec.ridge_period = *a.period;
  const auto data = generate_population(a.seed, a.subjects, a.impressions, spec);
  save_dataset(data, a.out);
  out << "wrote " << data.subjects.size() << " subjects x " << a.impressions << " impressions to "
      << a.out << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cancelable fingerprint templates from ridge features"};
  app.name("ridgeguard");
  app.require_subcommand(1);

  KeygenArgs kg;
  auto* keygen = app.add_subcommand("keygen", "Issue a projection key");
  keygen->add_option("--seed", kg.seed, "Key seed");
  keygen->add_option("--s", kg.s, "Sector count");
  keygen->add_option("--t", kg.t, "Projected dimension (default s/2)");
  keygen->add_option("--b", kg.b, "Log base");
  keygen->add_option("--out", kg.out, "Key file (stdout if omitted)");

  EnrollArgs en;
  auto* enroll_cmd = app.add_subcommand("enroll", "Create a protected template");
  enroll_cmd->add_option("--minutiae", en.minutiae, "Minutiae text file")->required();
  enroll_cmd->add_option("--skeleton", en.skeleton, "Skeleton PBM/PGM")->required();
  enroll_cmd->add_option("--key", en.key, "Key file")->required();
  enroll_cmd->add_option("--out", en.out, "Template file")->required();

  VerifyArgs vf;
  auto* verify = app.add_subcommand("verify", "Compare a query against a stored template");
  verify->add_option("--template", vf.tpl, "Stored template")->required();
  verify->add_option("--minutiae", vf.minutiae, "Query minutiae")->required();
  verify->add_option("--skeleton", vf.skeleton, "Query skeleton")->required();
  verify->add_option("--key", vf.key, "Key the template was made with")->required();
  verify->add_option("--threshold", vf.threshold, "Accept at score >= threshold");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Genuine/imposter evaluation");
  evaluate->add_option("--dataset", ev.dataset, "Directory <subject>/<impression>.{min,pgm}");
  evaluate->add_option("--synthetic", ev.synthetic, "Synthetic preset (clean, default, rigid)");
  evaluate->add_option("--subjects", ev.subjects, "Synthetic subjects");
  evaluate->add_option("--impressions", ev.impressions, "Synthetic impressions per subject");
  evaluate->add_option("--synth-seed", ev.synth_seed, "Synthetic population seed");
  evaluate->add_option("--seed", ev.seed, "Master key seed");
  evaluate->add_option("--protocol", ev.protocol, "fvc or 1vs1");
  evaluate->add_option("--key-policy", ev.key_policy, "same or per-user");
  evaluate->add_option("--trials", ev.trials, "Trials (key draws) to average");
  evaluate->add_option("--s", ev.s, "Sector count");
  evaluate->add_option("--b", ev.b, "Log base");
  evaluate->add_option("--t", ev.t, "Projected dimension (default s/2)");
  evaluate->add_option("--sweep", ev.sweep, "Parameter sweep, e.g. s=4,6,8 or b=1.1,1.2");
  evaluate->add_option("--out", ev.out, "Report directory");
  evaluate->add_option("--format", ev.format, "stdout format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  evaluate->add_option("--workers", ev.workers, "Scoring threads (default RIDGEGUARD_WORKERS or all cores)");

  DiagnoseArgs dg;
  auto* diagnose = app.add_subcommand("diagnose", "Security report for a key, template or matrix");
  diagnose->add_option("--key", dg.key, "Key file");
  diagnose->add_option("--template", dg.tpl, "Template file");
  diagnose->add_option("--matrix", dg.matrix, "JSON fixture with `rp` or `rp_transposed`");
  diagnose->add_option("--samples", dg.samples, "Keys sampled for the Gram statistics");
  diagnose->add_option("--out", dg.out, "Also write the report here");

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
  synth->add_option("--preset", sy.preset, "clean, default or rigid");
  synth->add_option("--subjects", sy.subjects, "Subjects");
  synth->add_option("--impressions", sy.impressions, "Impressions per subject");
  synth->add_option("--seed", sy.seed, "Population seed");
  synth->add_option("--minutiae", sy.n_minutiae, "Minutiae per finger");
  synth->add_option("--size", sy.size, "Image width and height");
  synth->add_option("--period", sy.period, "Ridge period in pixels");
  synth->add_option("--out", sy.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*keygen) return cmd_keygen(kg, out);
    if (*enroll_cmd) return cmd_enroll(en, out);
    if (*verify) return cmd_verify(vf, out);
    if (*evaluate) return cmd_evaluate(ev, out);
    if (*diagnose) return cmd_diagnose(dg, out);
    if (*synth) return cmd_synth(sy, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace ridgeguard::cli
