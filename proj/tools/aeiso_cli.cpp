// aeiso command-line interface.
//
// Exit codes: 0 success, 1 configuration error, 2 input/IO error,
// 3 mathematical failure (no consensus, infeasible, degenerate data, ...).

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aeiso/certifier.hpp"
#include "aeiso/errors.hpp"
#include "aeiso/extension.hpp"
#include "aeiso/format.hpp"
#include "aeiso/io.hpp"
#include "aeiso/measure.hpp"
#include "aeiso/trilateration.hpp"

namespace {

using nlohmann::json;

constexpr int kExitConfig = 1;
constexpr int kExitInput = 2;
constexpr int kExitMath = 3;

// Cap keeps the default quorum of 0.7 meaningful.
constexpr double kMaxEpsilon = 0.3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

/// Optional JSON config file; explicit flags override its keys.
class ConfigFile {
 public:
  void load(const std::string& path) {
    if (path.empty()) return;
    try {
      doc_ = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
      throw std::invalid_argument("config file " + path + ": " + e.what());
    }
    if (!doc_.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  }

  template <typename T>
  void fill(const CLI::App& app, const std::string& flag, const char* key, T& value) const {
    if (app.count(flag) > 0 || !doc_.contains(key)) return;
    try {
      value = doc_[key].get<T>();
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("config key \"") + key + "\": " + e.what());
    }
  }

  const json* section(const char* key) const { return doc_.contains(key) ? &doc_[key] : nullptr; }

 private:
  json doc_ = json::object();
};

struct RecoveryFlags {
  std::string mode = "robust";
  aeiso::RecoveryConfig cfg;
  bool refine = false;

  void add_to(CLI::App& app) {
    app.add_option("--mode", mode, "robust (consensus) or oracle (greedy, input order)")
        ->check(CLI::IsMember({"robust", "oracle"}));
    app.add_option("--tau", cfg.violation_tol, "pair-validity / inlier tolerance");
    app.add_option("--pair-tol", cfg.pair_tol, "distance tolerance of the simplex extension");
    app.add_option("--rank-rtol", cfg.rank_rtol, "relative singular-value threshold");
    app.add_option("--trials", cfg.ransac_trials, "consensus trials");
    app.add_option("--quorum", cfg.consensus_quorum, "required inlier fraction");
    app.add_option("--threads", cfg.threads, "worker threads for consensus trials");
    app.add_flag("--refine", refine, "least-squares refit over the inliers (robust mode)");
  }

  void apply(const CLI::App& app, const ConfigFile& conf) {
    conf.fill(app, "--mode", "mode", mode);
    conf.fill(app, "--tau", "tau", cfg.violation_tol);
    conf.fill(app, "--pair-tol", "pair_tol", cfg.pair_tol);
    conf.fill(app, "--rank-rtol", "rank_rtol", cfg.rank_rtol);
    conf.fill(app, "--trials", "trials", cfg.ransac_trials);
    conf.fill(app, "--quorum", "quorum", cfg.consensus_quorum);
    conf.fill(app, "--threads", "threads", cfg.threads);
    conf.fill(app, "--refine", "refine", refine);
    conf.fill(app, "--seed", "seed", cfg.seed);
    cfg.validate();
  }
};

aeiso::CorrespondenceSet load_correspondences(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return aeiso::read_correspondences(in);
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string config_path;
  std::size_t d = 2;
  std::size_t n = 100;
  std::string measure = "gaussian";
  std::string corruption;
  double epsilon = 0.0;
  double displacement = 1.0;
  double slab_thickness = 0.0;
  double slab_offset = 0.0;
  std::string out;
  std::string truth;
  std::uint64_t seed = 0;
};

int run_generate(const CLI::App& app, GenerateArgs a) {
  ConfigFile conf;
  conf.load(a.config_path);
  conf.fill(app, "--d", "d", a.d);
  conf.fill(app, "--n", "n", a.n);
  conf.fill(app, "--epsilon", "epsilon", a.epsilon);
  conf.fill(app, "--seed", "seed", a.seed);
  aeiso::require_dimension(a.d);
  if (!(a.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");

  json measure_doc = {{"kind", a.measure}};
  if (app.count("--measure") == 0 && conf.section("measure")) measure_doc = *conf.section("measure");
  const aeiso::MeasureModel model = aeiso::measure_from_json(measure_doc, a.d, a.seed);

  json corruption_doc;
  if (app.count("--corruption") > 0) {
    corruption_doc = {{"kind", a.corruption}};
  } else if (conf.section("corruption")) {
    corruption_doc = *conf.section("corruption");
  } else {
    corruption_doc = {{"kind", a.epsilon > 0.0 ? "point-fraction" : "none"}};
  }
  if (app.count("--epsilon") > 0 || !corruption_doc.contains("epsilon")) corruption_doc["epsilon"] = a.epsilon;
  if (app.count("--displacement") > 0) corruption_doc["displacement"] = a.displacement;
  if (app.count("--slab-thickness") > 0) corruption_doc["thickness"] = a.slab_thickness;
  if (app.count("--slab-offset") > 0) corruption_doc["offset"] = a.slab_offset;
  const aeiso::Corruption corruption = aeiso::corruption_from_json(corruption_doc, a.d);
  if (const auto* pf = std::get_if<aeiso::PointFraction>(&corruption); pf && pf->epsilon > kMaxEpsilon) {
    throw std::invalid_argument("epsilon " + aeiso::format_real(pf->epsilon) + " exceeds the cap of 0.3");
  }

  aeiso::Rng truth_rng = aeiso::Rng::substream(a.seed, aeiso::Stream::GroundTruth);
  const aeiso::CorruptedMap map{aeiso::random_isometry(truth_rng, a.d), corruption, a.seed};
  map.validate();

  const aeiso::GeneratedData data = aeiso::make_correspondences(model, map, a.n);
  std::ostringstream body;
  aeiso::write_correspondences(body, data.correspondences);

  std::string corrupted = "[";
  for (std::size_t i = 0; i < data.corrupted.size(); ++i) {
    if (!data.corrupted[i]) continue;
    if (corrupted.size() > 1) corrupted += ',';
    corrupted += std::to_string(i);
  }
  corrupted += "]";
  const std::string sidecar = "{\"d\":" + std::to_string(a.d) + ",\"n\":" + std::to_string(a.n) +
                              ",\"seed\":" + std::to_string(a.seed) + ",\"isometry\":" + aeiso::to_json(map.base) +
                              ",\"measure\":" + aeiso::to_json(model) + ",\"corruption\":" +
                              aeiso::to_json(corruption) + ",\"corrupted\":" + corrupted + "}\n";

  write_file(a.out, body.str());
  write_file(a.truth.empty() ? a.out + ".truth.json" : a.truth, sidecar);
  return 0;
}

struct RecoverArgs {
  std::string config_path;
  std::string input;
  RecoveryFlags flags;
};

int run_recover(const CLI::App& app, RecoverArgs a) {
  ConfigFile conf;
  conf.load(a.config_path);
  a.flags.apply(app, conf);
  const aeiso::CorrespondenceSet cs = load_correspondences(a.input);

  std::optional<aeiso::EuclideanIsometry> h;
  if (a.flags.mode == "oracle") {
    h = aeiso::recover_oracle(cs, a.flags.cfg).isometry;
  } else {
    aeiso::RobustRecovery rr = aeiso::recover_robust(cs, a.flags.cfg);
    h = a.flags.refine ? aeiso::procrustes_fit(cs, rr.inliers, a.flags.cfg.rank_rtol) : rr.isometry;
  }
  std::cout << aeiso::to_json(*h) << "\n";
  return 0;
}

struct CertifyArgs {
  std::string config_path;
  std::string input;
  std::string output;
  std::string residuals;
  RecoveryFlags flags;
};

int run_certify(const CLI::App& app, CertifyArgs a) {
  ConfigFile conf;
  conf.load(a.config_path);
  a.flags.apply(app, conf);
  const aeiso::CorrespondenceSet cs = load_correspondences(a.input);
  const aeiso::CertificationReport report = aeiso::certify(cs, a.flags.cfg);
  const std::string doc = aeiso::to_json(report, a.flags.cfg) + "\n";
  if (a.output.empty()) {
    std::cout << doc;
  } else {
    write_file(a.output, doc);
  }
  if (!a.residuals.empty()) {
    std::ostringstream csv;
    aeiso::write_residual_csv(csv, report);
    write_file(a.residuals, csv.str());
  }
  return 0;
}

struct TrilaterateArgs {
  std::string input;
  double res_tol = aeiso::kDefaultResidualTol;
  double rank_rtol = aeiso::kDefaultRankRtol;
  std::uint64_t seed = 0;
};

int run_trilaterate(const TrilaterateArgs& a) {
  if (!(a.res_tol > 0.0) || !(a.rank_rtol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  const aeiso::AnchorSet anchors = aeiso::anchor_set_from_json(read_file(a.input));
  const aeiso::Point z = aeiso::locate(anchors, a.res_tol, a.rank_rtol);
  std::cout << "{\"point\":" << aeiso::format_array(z) << "}\n";
  return 0;
}

struct ExtendArgs {
  std::string input;
  double rank_rtol = aeiso::kDefaultRankRtol;
  double pair_tol = aeiso::kDefaultPairTol;
  std::uint64_t seed = 0;
};

int run_extend(const ExtendArgs& a) {
  if (!(a.pair_tol > 0.0) || !(a.rank_rtol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  const aeiso::LabeledSimplex ls = aeiso::labeled_simplex_from_json(read_file(a.input));
  const aeiso::Extension ext = aeiso::extend_finite_isometry(ls, a.rank_rtol, a.pair_tol);
  std::cout << aeiso::to_json(ext.isometry) << "\n";
  std::cerr << "orthogonality repair: " << aeiso::format_real(ext.repair) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recover and certify Euclidean isometries from almost-everywhere isometric data"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "sample correspondences from a corrupted isometry");
  generate->add_option("--config", gen.config_path, "JSON config; flags override its keys");
  generate->add_option("--d", gen.d, "dimension");
  generate->add_option("--n", gen.n, "number of correspondences");
  generate->add_option("--measure", gen.measure, "gaussian | uniform-box | hyperplane | gaussian-mixture");
  generate->add_option("--corruption", gen.corruption, "none | point-fraction | slab");
  generate->add_option("--epsilon", gen.epsilon, "corrupted point fraction (<= 0.3)");
  generate->add_option("--displacement", gen.displacement, "radius of corrupted displacements");
  generate->add_option("--slab-thickness", gen.slab_thickness, "slab corruption thickness");
  generate->add_option("--slab-offset", gen.slab_offset, "slab corruption offset");
  generate->add_option("--out", gen.out, "correspondence file (JSON Lines)")->required();
  generate->add_option("--truth", gen.truth, "ground-truth sidecar (default <out>.truth.json)");
  generate->add_option("--seed", gen.seed, "random seed");

  RecoverArgs rec;
  auto* recover = app.add_subcommand("recover", "print the recovered isometry as JSON");
  recover->add_option("--config", rec.config_path, "JSON config; flags override its keys");
  recover->add_option("--input", rec.input, "correspondence file")->required();
  rec.flags.add_to(*recover);
  recover->add_option("--seed", rec.flags.cfg.seed, "consensus seed");

  CertifyArgs cert;
  auto* certify_cmd = app.add_subcommand("certify", "write a certification report");
  certify_cmd->add_option("--config", cert.config_path, "JSON config; flags override its keys");
  certify_cmd->add_option("--input", cert.input, "correspondence file")->required();
  certify_cmd->add_option("--output", cert.output, "report path (default: standard output)");
  certify_cmd->add_option("--residuals", cert.residuals, "optional per-point residual CSV");
  cert.flags.add_to(*certify_cmd);
  certify_cmd->add_option("--seed", cert.flags.cfg.seed, "consensus seed");

  TrilaterateArgs tri;
  auto* trilaterate = app.add_subcommand("trilaterate", "locate a point from d+1 anchor distances");
  trilaterate->add_option("--input", tri.input, "anchors JSON {\"anchors\":..,\"distances\":..}")->required();
  trilaterate->add_option("--res-tol", tri.res_tol, "relative residual tolerance");
  trilaterate->add_option("--rank-rtol", tri.rank_rtol, "relative singular-value threshold");
  trilaterate->add_option("--seed", tri.seed, "unused; accepted on every subcommand");

  ExtendArgs ext;
  auto* extend = app.add_subcommand("extend", "extend a distance-preserving simplex labelling");
  extend->add_option("--input", ext.input, "simplex JSON {\"source\":..,\"images\":..}")->required();
  extend->add_option("--rank-rtol", ext.rank_rtol, "relative singular-value threshold");
  extend->add_option("--pair-tol", ext.pair_tol, "pairwise distance tolerance");
  extend->add_option("--seed", ext.seed, "unused; accepted on every subcommand");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*generate) return run_generate(*generate, gen);
    if (*recover) return run_recover(*recover, rec);
    if (*certify_cmd) return run_certify(*certify_cmd, cert);
    if (*trilaterate) return run_trilaterate(tri);
    if (*extend) return run_extend(ext);
  } catch (const aeiso::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitInput;
  } catch (const aeiso::MathError& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitMath;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
