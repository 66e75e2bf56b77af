// csp: command-line front end for sampling, probabilities, validity checks,
// equivalence runs and inference.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "csp/alloc.hpp"
#include "csp/crm.hpp"
#include "csp/epf.hpp"
#include "csp/equivalences.hpp"
#include "csp/infer.hpp"
#include "csp/sticks.hpp"
#include "csp/subord.hpp"

using nlohmann::json;
using namespace csp;

namespace {

constexpr const char* kSchema = "csp/1";

// Exit codes.
constexpr int kOk = 0;
constexpr int kToleranceFailed = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  double theta = 1.0;
  double gamma = 1.0;
  double beta = 1.0;
  int n = 5;
  long reps = 1;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string format = "jsonl";
  std::string output;
  bool timing = false;
};

// Writes one record per line as JSON, or as CSV rows under a header that is
// repeated whenever the column set changes.
class Emitter {
 public:
  Emitter(std::ostream& out, std::string format) : out_(out), format_(std::move(format)) {}

  void write(json record) {
    record["schema"] = kSchema;
    if (format_ == "jsonl") {
      out_ << record.dump() << '\n';
      return;
    }
    std::vector<std::string> keys;
    for (auto it = record.begin(); it != record.end(); ++it) keys.push_back(it.key());
    if (keys != header_) {
      header_ = keys;
      for (std::size_t i = 0; i < keys.size(); ++i) out_ << (i ? "," : "") << keys[i];
      out_ << '\n';
    }
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const json& v = record[keys[i]];
      std::string cell = v.is_string() ? v.get<std::string>() : v.dump();
      if (cell.find_first_of(",\"\n") != std::string::npos) {
        std::string quoted = "\"";
        for (char c : cell) quoted += (c == '"') ? std::string("\"\"") : std::string(1, c);
        cell = quoted + "\"";
      }
      out_ << (i ? "," : "") << cell;
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
  std::string format_;
  std::vector<std::string> header_;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CSP_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("CSP_SEED must be a nonnegative integer");
    }
  }
  return 0;
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      sizes.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw UsageError("--sizes must be a comma-separated list of integers");
    }
  }
  if (sizes.empty()) throw UsageError("--sizes is empty");
  return sizes;
}

json atoms_json(const AtomicMeasure& m) {
  json atoms = json::array();
  for (const Atom& a : m.atoms) {
    json atom = {{"weight", a.weight}, {"label", a.label}};
    if (a.first_round > 0) atom["first_round"] = a.first_round;
    atoms.push_back(atom);
  }
  return atoms;
}

json measure_json(const AtomicMeasure& m, long rep) {
  return {{"type", "atomic_measure"},   {"rep", rep},
          {"atoms", atoms_json(m)},     {"normalized", m.normalized},
          {"total_weight", m.total_weight()},
          {"truncation_threshold", m.truncation_threshold},
          {"omitted_mass_mean", m.omitted_mass_mean},
          {"rounds", m.rounds},         {"label_collisions", m.label_collisions}};
}

json sticks_json(const StickWeights& s, long rep) {
  json out = {{"type", "sticks"},
              {"rep", rep},
              {"kind", s.kind == StickKind::partition ? "partition" : "feature"},
              {"weights", std::vector<double>(s.weights.data(), s.weights.data() + s.weights.size())},
              {"tail_mass_bound", s.tail_mass_bound}};
  if (s.round_built()) {
    out["first_round"] = s.first_round;
    out["rounds"] = s.rounds;
  }
  return out;
}

json report_json(const EquivalenceReport& r, bool timing) {
  json out = {{"type", "equivalence"}, {"name", r.name},       {"sampler_a", r.sampler_a},
              {"sampler_b", r.sampler_b}, {"statistic", r.statistic}, {"distance", r.distance},
              {"tolerance", r.tolerance}, {"reps_a", r.reps_a},     {"reps_b", r.reps_b},
              {"passed", r.passed}};
  if (timing) out["runtime_seconds"] = r.runtime_seconds;
  return out;
}

std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open data file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::exception&) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": not valid JSON");
    }
    std::vector<double> values;
    if (row.is_number()) {
      values.push_back(row.get<double>());
    } else if (row.is_array()) {
      for (const json& v : row) {
        if (!v.is_number()) throw UsageError(path + ":" + std::to_string(line_no) + ": non-numeric entry");
        values.push_back(v.get<double>());
      }
    } else {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected a number or an array of numbers");
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": row length differs from the first row");
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw UsageError("data file '" + path + "' has no rows");
  return rows;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--theta", o.theta, "concentration theta > 0");
  cmd->add_option("--gamma", o.gamma, "IBP / beta process mass gamma > 0");
  cmd->add_option("--beta", o.beta, "gamma process rate beta > 0");
  cmd->add_option("--n", o.n, "number of indices");
  cmd->add_option("--reps", o.reps, "replicates")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "RNG seed (default: $CSP_SEED or 0)");
  cmd->add_option("--threads", o.threads, "worker threads, 0 = all cores; output does not depend on it");
  cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"jsonl", "csv"}));
  cmd->add_option("--output,-o", o.output, "write to a file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exchangeable partitions and feature allocations: samplers, probability functions, checks"};
  app.require_subcommand(1);
  Options o;

  // sample
  std::string sample_kind;
  double threshold = 1e-4;
  double tail = kDefaultTailTolerance;
  auto* sample = app.add_subcommand("sample", "draw structures, sticks or random measures");
  sample->add_option("kind", sample_kind, "what to draw")
      ->required()
      ->check(CLI::IsMember({"crp", "ibp", "gem", "ibp-sticks", "gamma-process", "beta-process"}));
  sample->add_option("--threshold", threshold, "gamma process jump threshold");
  sample->add_option("--tail", tail, "GEM tail-mass target");
  int stick_k = 0;
  int rounds = 0;
  sample->add_option("--k", stick_k, "GEM: break exactly K sticks instead of breaking to --tail");
  sample->add_option("--rounds", rounds, "ibp-sticks, beta-process: rounds (default --n)");
  add_common(sample, o);

  // prob
  std::string prob_kind;
  std::string sizes_text;
  std::string structure_text;
  std::string family = "gamma";
  double quad_tol = 1e-10;
  auto* prob = app.add_subcommand("prob", "evaluate EPPF / EFPF values");
  prob->add_option("kind", prob_kind, "eppf (CRP), efpf (IBP) or laplace (from a Laplace exponent)")
      ->required()
      ->check(CLI::IsMember({"eppf", "efpf", "laplace"}));
  prob->add_option("--sizes", sizes_text, "block sizes, e.g. 2,1,3");
  prob->add_option("--structure", structure_text, "a structure record, e.g. [[1,3],[2]]");
  prob->add_option("--family", family, "Levy family for laplace")->check(CLI::IsMember({"gamma", "beta"}));
  prob->add_option("--tol", quad_tol, "quadrature tolerance for laplace");
  add_common(prob, o);

  // check
  std::string check_kind;
  std::string candidate = "crp";
  int n_max = 6;
  double check_tol = 1e-9;
  auto* check = app.add_subcommand("check", "validity checks");
  check->add_option("kind", check_kind)->required()->check(CLI::IsMember({"epf"}));
  check->add_option("--candidate", candidate, "crp, or fake (a symmetric function that is not an EPPF)")
      ->check(CLI::IsMember({"crp", "fake"}));
  check->add_option("--n-max", n_max, "largest n checked (1..10)");
  check->add_option("--tol", check_tol, "absolute tolerance");
  add_common(check, o);

  // jumps
  int count = 0;
  auto* jumps_cmd = app.add_subcommand("jumps", "Ferguson-Klass jumps of a subordinator");
  jumps_cmd->add_option("--family", family)->check(CLI::IsMember({"gamma", "beta"}));
  jumps_cmd->add_option("--threshold", threshold, "keep jumps above this size");
  jumps_cmd->add_option("--count", count, "keep the largest COUNT jumps instead");
  add_common(jumps_cmd, o);

  // draw
  std::string draw_kind;
  auto* draw = app.add_subcommand("draw", "labeled draws from random measures");
  draw->add_option("kind", draw_kind)->required()->check(CLI::IsMember({"dp-labels", "bernoulli-process"}));
  draw->add_option("--threshold", threshold, "gamma process jump threshold");
  add_common(draw, o);

  // equiv
  std::string pairing;
  EquivalenceOptions eq;
  auto* equiv = app.add_subcommand("equiv", "cross-representation equivalence checks");
  std::vector<std::string> names;
  for (const auto& p : equivalence_pairings()) names.push_back(p.name);
  equiv->add_option("pairing", pairing, "pairing name, or 'list'")
      ->required()
      ->check(CLI::IsMember([&] {
        auto all = names;
        all.push_back("list");
        return all;
      }()));
  equiv->add_option("--tolerance", eq.tolerance, "override the default tolerance");
  equiv->add_option("--threshold", eq.threshold, "gamma process truncation");
  equiv->add_option("--round", eq.round, "IBP round for stick-law pairings");
  equiv->add_option("--urn-size", eq.urn_size, "customers seated in the urn pairing");
  equiv->add_option("--beta-alt", eq.beta_alt, "second scale for gamma-scale");
  equiv->add_flag("--timing", o.timing, "include runtime in the report");
  add_common(equiv, o);
  o.reps = -1;
  o.n = -1;

  // infer
  std::string infer_kind;
  std::string data_path;
  int sweeps = 200;
  double noise_sd = 0.5;
  int anneal = 0;
  double feature_sd = 1.0;
  NormalNigLikelihood nig;
  auto* infer = app.add_subcommand("infer", "Gibbs samplers for CRP mixtures and IBP factor models");
  infer->add_option("kind", infer_kind)->required()->check(CLI::IsMember({"crp", "ibp"}));
  infer->add_option("--data", data_path, "JSONL, one number or numeric array per line")->required();
  infer->add_option("--sweeps", sweeps)->check(CLI::PositiveNumber);
  infer->add_option("--noise-sd", noise_sd, "ibp: observation noise sd");
  infer->add_option("--anneal", anneal,
                    "ibp: extra burn-in sweeps with noise sd lowered from 5x to 1x; not reported")
      ->check(CLI::NonNegativeNumber);
  infer->add_option("--feature-sd", feature_sd, "ibp: prior sd of feature loadings");
  infer->add_option("--m0", nig.m0, "crp: prior mean");
  infer->add_option("--kappa0", nig.kappa0, "crp: prior mean precision scale");
  infer->add_option("--a0", nig.a0, "crp: inverse-gamma shape");
  infer->add_option("--b0", nig.b0, "crp: inverse-gamma scale");
  add_common(infer, o);

  try {
    o.seed = default_seed();
  } catch (const UsageError& e) {
    std::cerr << "csp: " << e.what() << '\n';
    return kUsage;
  }
  // Subcommands other than equiv fall back to these when not given.
  const int default_n = 5;
  const long default_reps = 1;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  std::ofstream file;
  if (!o.output.empty()) {
    file.open(o.output);
    if (!file) {
      std::cerr << "csp: cannot open output file '" << o.output << "'\n";
      return kUsage;
    }
  }
  std::ostream& out = o.output.empty() ? std::cout : file;
  out.precision(17);
  Emitter emit(out, o.format);
  const bool is_equiv = equiv->parsed();
  const int n = (o.n > 0 || is_equiv) ? o.n : default_n;
  const long reps = (o.reps > 0 || is_equiv) ? o.reps : default_reps;

  try {
    if (sample->parsed()) {
      Rng rng(o.seed);
      for (long r = 0; r < reps; ++r) {
        if (sample_kind == "crp") {
          emit.write({{"type", "partition"}, {"rep", r}, {"n", n}, {"structure", format(crp_sample(CrpParams(o.theta), n, rng))}});
        } else if (sample_kind == "ibp") {
          emit.write({{"type", "feature_allocation"}, {"rep", r}, {"n", n},
                      {"structure", format(ibp_sample(IbpParams(o.gamma, o.theta), n, rng))}});
        } else if (sample_kind == "gem") {
          const GemParams gem(o.theta);
          emit.write(sticks_json(stick_k > 0 ? gem_sticks(gem, stick_k, rng) : gem_sticks_to_tolerance(gem, tail, rng), r));
        } else if (sample_kind == "ibp-sticks") {
          emit.write(sticks_json(ibp_sticks(IbpParams(o.gamma, o.theta), rounds > 0 ? rounds : n, rng), r));
        } else if (sample_kind == "gamma-process") {
          emit.write(measure_json(gamma_process(o.theta, o.beta, BaseDistribution::uniform(), threshold, rng), r));
        } else {
          emit.write(measure_json(
              beta_process(o.gamma, o.theta, BaseDistribution::uniform(), rounds > 0 ? rounds : n, rng), r));
        }
      }
      return kOk;
    }

    if (prob->parsed()) {
      if (sizes_text.empty() == structure_text.empty()) throw UsageError("give exactly one of --sizes, --structure");
      if (prob_kind == "eppf") {
        const CrpParams params(o.theta);
        const std::vector<int> sizes =
            structure_text.empty() ? parse_sizes(sizes_text) : parse_partition(structure_text).block_sizes();
        const EpfValue v = eppf_crp(params, sizes);
        emit.write({{"type", "probability"}, {"function", "eppf"}, {"family", "crp"}, {"theta", o.theta},
                    {"sizes", sizes}, {"log_prob", v.log_prob}, {"prob", v.prob()}});
      } else if (prob_kind == "efpf") {
        const IbpParams params(o.gamma, o.theta);
        json record = {{"type", "probability"}, {"function", "efpf"}, {"family", "ibp"},
                       {"gamma", o.gamma}, {"theta", o.theta}};
        if (structure_text.empty()) {
          const std::vector<int> sizes = parse_sizes(sizes_text);
          const EpfValue v = efpf_ibp(params, n, sizes);
          record.update({{"n", n}, {"sizes", sizes}, {"log_prob", v.log_prob}, {"prob", v.prob()}});
        } else {
          const FeatureAllocation f = parse_feature_allocation(structure_text, o.n);
          const EpfValue ordered = efpf_ibp(params, f.n(), f.block_sizes());
          const EpfValue unordered = ibp_allocation_log_prob(params, f);
          record.update({{"n", f.n()}, {"structure", format(f)}, {"sizes", f.block_sizes()},
                         {"log_prob", ordered.log_prob}, {"prob", ordered.prob()},
                         {"unordered_log_prob", unordered.log_prob}, {"unordered_prob", unordered.prob()}});
        }
        emit.write(record);
      } else {
        const LevySpec spec = family == "gamma" ? LevySpec::gamma(o.theta, o.beta) : LevySpec::beta(o.gamma, o.theta);
        const std::vector<int> sizes =
            structure_text.empty() ? parse_sizes(sizes_text) : parse_partition(structure_text).block_sizes();
        const EppfQuadrature q = eppf_from_laplace(spec, sizes, quad_tol);
        json record = {{"type", "probability"}, {"function", "eppf-laplace"}, {"family", family},
                       {"theta", o.theta},      {"sizes", sizes},          {"log_prob", q.value.log_prob},
                       {"prob", q.value.prob()}, {"error_bound", q.error_bound}};
        if (family == "gamma") {
          record["beta"] = o.beta;
          record["closed_form_log_prob"] = eppf_crp(CrpParams(o.theta), sizes).log_prob;
        } else {
          record["gamma"] = o.gamma;
        }
        emit.write(record);
      }
      return kOk;
    }

    if (check->parsed()) {
      EppfCandidate fn;
      if (candidate == "crp") {
        const CrpParams params(o.theta);
        fn = [params](std::span<const int> sizes) { return eppf_crp(params, sizes).prob(); };
      } else {
        fn = [](std::span<const int> sizes) {
          std::vector<int> s(sizes.begin(), sizes.end());
          if (s == std::vector<int>{1}) return 1.0;
          if (s == std::vector<int>{1, 1}) return 0.1;
          if (s == std::vector<int>{2}) return 0.8;
          return 0.0;
        };
      }
      const EpfValidityReport r = eppf_validity_check(fn, n_max, check_tol);
      auto part = [](const EpfCheck& c) {
        json j = {{"passed", c.passed}, {"max_error", c.max_error}};
        if (!c.passed) {
          j["first_failing_n"] = c.first_failing_n;
          j["detail"] = c.detail;
        }
        return j;
      };
      emit.write({{"type", "validity"},          {"candidate", candidate},
                  {"n_max", n_max},              {"tolerance", check_tol},
                  {"symmetry", part(r.symmetry)}, {"additivity", part(r.additivity)},
                  {"normalization", part(r.normalization)}, {"passed", r.passed()},
                  {"first_violation", r.first_violation}});
      return r.passed() ? kOk : kToleranceFailed;
    }

    if (jumps_cmd->parsed()) {
      const LevySpec spec = family == "gamma" ? LevySpec::gamma(o.theta, o.beta) : LevySpec::beta(o.gamma, o.theta);
      const JumpTruncation trunc = count > 0 ? JumpTruncation::largest(count) : JumpTruncation::above(threshold);
      Rng rng(o.seed);
      for (long r = 0; r < reps; ++r) {
        const JumpSet js = ferguson_klass_jumps(spec, trunc, rng);
        emit.write({{"type", "jumps"},
                    {"rep", r},
                    {"family", family},
                    {"jumps", js.jumps},
                    {"truncation_threshold", js.truncation_threshold},
                    {"omitted_mass_mean", js.omitted_mass_mean},
                    {"total_mean", levy_mean_total(spec)}});
      }
      return kOk;
    }

    if (draw->parsed()) {
      Rng rng(o.seed);
      for (long r = 0; r < reps; ++r) {
        if (draw_kind == "dp-labels") {
          const AtomicMeasure dp =
              dirichlet_process(gamma_process(o.theta, o.beta, BaseDistribution::uniform(), threshold, rng));
          const LabelDraw d = dp_draw_labels(dp, n, rng);
          emit.write({{"type", "labeled_partition"}, {"rep", r}, {"n", n}, {"labels", d.labels},
                      {"structure", format(d.partition)}, {"atoms", dp.atoms.size()}});
        } else {
          const AtomicMeasure bp = beta_process(o.gamma, o.theta, BaseDistribution::uniform(), n, rng);
          const FeatureDraw d = bernoulli_process_draw(bp, n, rng);
          emit.write({{"type", "labeled_feature_allocation"}, {"rep", r}, {"n", n}, {"labels", d.label_sets},
                      {"structure", format(d.allocation)}, {"atoms", bp.atoms.size()}});
        }
      }
      return kOk;
    }

    if (equiv->parsed()) {
      if (pairing == "list") {
        for (const auto& p : equivalence_pairings()) {
          emit.write({{"type", "pairing"}, {"name", p.name}, {"description", p.description},
                      {"statistic", p.statistic}, {"default_n", p.default_n}, {"default_reps", p.default_reps},
                      {"default_tolerance", p.default_tolerance}});
        }
        return kOk;
      }
      eq.theta = o.theta;
      eq.gamma = o.gamma;
      eq.beta = o.beta;
      eq.n = n;
      eq.reps = reps;
      eq.seed = o.seed;
      eq.threads = o.threads;
      const EquivalenceReport report = run_equivalence(pairing, eq);
      emit.write(report_json(report, o.timing));
      return report.passed ? kOk : kToleranceFailed;
    }

    if (infer->parsed()) {
      const auto rows = read_rows(data_path);
      Rng rng(o.seed);
      if (infer_kind == "crp") {
        if (rows.front().size() != 1) throw UsageError("infer crp expects one number per line");
        std::vector<double> data;
        for (const auto& row : rows) data.push_back(row.front());
        MixtureState state = make_mixture_state(CrpParams(o.theta), data, std::vector<int>(data.size(), 0));
        std::vector<Partition> draws;
        for (int s = 1; s <= sweeps; ++s) {
          crp_gibbs_sweep(state, data, nig, rng);
          draws.push_back(state.partition());
          emit.write({{"type", "sweep"}, {"model", "crp-normal"}, {"sweep", s}, {"blocks", state.num_blocks()},
                      {"log_joint", mixture_log_joint(state, nig)}, {"structure", format(draws.back())}});
        }
        const std::span<const Partition> tail_draws(draws.data() + draws.size() / 2, draws.size() - draws.size() / 2);
        const Eigen::MatrixXd co = co_clustering(tail_draws);
        std::vector<std::vector<double>> co_rows(co.rows());
        for (Eigen::Index i = 0; i < co.rows(); ++i) {
          for (Eigen::Index j = 0; j < co.cols(); ++j) co_rows[i].push_back(co(i, j));
        }
        double mean_blocks = 0.0;
        for (const Partition& p : tail_draws) mean_blocks += p.num_blocks();
        emit.write({{"type", "posterior"}, {"model", "crp-normal"}, {"sweeps", sweeps},
                    {"burn_in", static_cast<int>(draws.size() / 2)},
                    {"mean_blocks", mean_blocks / tail_draws.size()}, {"co_clustering", co_rows},
                    {"final_structure", format(state.partition())}});
      } else {
        Eigen::MatrixXd data(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
          for (std::size_t d = 0; d < rows[i].size(); ++d) data(i, d) = rows[i][d];
        }
        const LinearGaussianModel model(noise_sd, feature_sd);
        FeatureState state{Eigen::MatrixXi(data.rows(), 0), Eigen::MatrixXd(0, data.cols()), IbpParams(o.gamma, o.theta)};
        for (int s = 0; s < anneal; ++s) {
          const double scale = 1.0 + 4.0 * (1.0 - static_cast<double>(s) / anneal);
          ibp_gibbs_sweep(state, data, LinearGaussianModel(noise_sd * scale, feature_sd), rng);
        }
        std::map<int, long> k_counts;
        Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(data.rows());
        long kept = 0;
        for (int s = 1; s <= sweeps; ++s) {
          ibp_gibbs_sweep(state, data, model, rng);
          emit.write({{"type", "sweep"}, {"model", "ibp-linear-gaussian"}, {"sweep", s},
                      {"features", state.num_features()}, {"log_joint", feature_log_joint(state, data, model)},
                      {"structure", format(state.allocation())}});
          if (s > sweeps / 2) {
            ++k_counts[state.num_features()];
            row_sums += state.z.rowwise().sum().cast<double>();
            ++kept;
          }
        }
        int mode = 0;
        long best = -1;
        for (const auto& [k, c] : k_counts) {
          if (c > best) {
            best = c;
            mode = k;
          }
        }
        row_sums /= static_cast<double>(std::max<long>(kept, 1));
        json k_hist = json::object();
        for (const auto& [k, c] : k_counts) k_hist[std::to_string(k)] = c;
        emit.write({{"type", "posterior"}, {"model", "ibp-linear-gaussian"}, {"sweeps", sweeps},
                    {"burn_in", sweeps / 2}, {"feature_count_mode", mode}, {"feature_count_histogram", k_hist},
                    {"mean_row_sums", std::vector<double>(row_sums.data(), row_sums.data() + row_sums.size())},
                    {"final_structure", format(state.allocation())}});
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "csp: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "csp: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "csp: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "csp: error: " << e.what() << '\n';
    return kToleranceFailed;
  }
  return kUsage;
}
