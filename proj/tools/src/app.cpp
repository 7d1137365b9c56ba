#include "robenv_cli/app.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "robenv/bounds.hpp"
#include "robenv/classifiers.hpp"
#include "robenv/error.hpp"
#include "robenv/perturb.hpp"
#include "robenv/robustness.hpp"
#include "robenv_cli/suites.hpp"

namespace robenv::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

struct Common {
  std::string format;
  std::string output;
  unsigned threads = 0;
  std::uint64_t cap_images = kDefaultImageCap;
};

struct BoundsArgs {
  double r = 0;
  long n = 0;
  int h = 0;
  int b = 0;
  std::vector<int> p_list{0, 1, 2};
};

struct VerifyArgs {
  std::string suite;
  std::uint64_t seed = 7;
  std::string mutant;
  std::uint64_t cap_subsets = std::uint64_t{1} << 16;
  std::vector<double> c_grid;
  std::uint64_t samples = 0;
};

struct AttackArgs {
  std::string image;
  std::string classifier = "sum";
  std::string method = "minimal";
  int norm = 0;
  double radius = -1;
  std::uint64_t seed = 0;
};

struct EstimateArgs {
  int n = 0;
  int h = 0;
  int b = 0;
  std::string classifier = "sum";
  int label = 0;
  int norm = 0;
  double size = 0;
  std::string method = "monte_carlo";
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const Common& common, std::ostream& out, const std::string& text) {
  if (common.output.empty() || common.output == "-") {
    out << text;
    return;
  }
  std::ofstream file(common.output, std::ios::binary);
  if (!file) throw UsageError("cannot open output file '" + common.output + "'");
  file << text;
}

std::string read_input(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot read image file '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(file), {});
}

ordered_json image_json(const ImageTensor& image) { return ordered_json::parse(encode_image(image)); }

int cmd_bounds(const BoundsArgs& a, const Common& common, std::ostream& out) {
  const auto rows = bounds_table(a.r, a.n, a.h, a.b, a.p_list);
  emit(common, out, common.format == "json" ? bounds_json(rows) : bounds_csv(rows));
  return kExitOk;
}

int cmd_verify(const VerifyArgs& a, const Common& common, std::ostream& out, std::ostream& err) {
  SuiteConfig config;
  config.seed = a.seed;
  config.threads = common.threads;
  config.cap_images = common.cap_images;
  config.cap_subsets = a.cap_subsets;
  config.c_grid = a.c_grid;
  config.mutant = a.mutant;
  if (a.samples > 0) {
    config.random_subsets = a.samples;
    config.failure_samples = a.samples;
  }
  std::vector<SuiteReport> reports;
  try {
    reports = run_suites(a.suite, config);
  } catch (const Error& e) {
    err << "verify aborted: " << e.what() << "\n";
    return kExitFailed;
  }
  emit(common, out, common.format == "json" ? reports_to_json(reports, config) : reports_to_text(reports));
  for (const auto& r : reports) {
    if (!r.passed()) return kExitFailed;
  }
  return kExitOk;
}

int cmd_attack(const AttackArgs& a, const Common& common, std::ostream& out, std::ostream& err) {
  const ImageTensor image = decode_image(read_input(a.image));
  const ClassifierHandle c = parse_classifier_spec(image.params(), a.classifier, common.cap_images);
  ordered_json j;
  j["method"] = a.method;
  j["classifier"] = c.name();
  j["input"] = image_json(image);
  if (a.method == "findpert") {
    if (a.radius < 0) throw UsageError("--method findpert needs --radius");
    const PerturbationOutcome o = find_perturbation(c, image, a.radius, a.seed);
    j["p"] = 2;
    j["radius"] = a.radius;
    j["seed"] = a.seed;
    j["success"] = o.success();
    j["distance"] = o.success() ? ordered_json(o.l2_moved) : ordered_json(nullptr);
    j["witness"] = o.success() ? image_json(*o.result) : ordered_json(nullptr);
    j["bound"] = o.bound;
    j["within_bound"] = o.within_bound;
    j["cells_examined"] = o.cells_examined;
    emit(common, out, j.dump(2) + "\n");
    if (!o.success()) {
      err << "no different-label cell within radius " << a.radius << "\n";
      return kExitFailed;
    }
    return kExitOk;
  }
  std::optional<MinimalPerturbation> found;
  try {
    if (a.method == "minimal") {
      found = minimal_perturbation(c, image, a.norm, common.cap_images);
    } else if (a.method == "sum") {
      if (c.kind() != ClassifierKind::Sum) throw UsageError("--method sum needs --classifier sum");
      found = attack_sum_classifier(image, a.norm);
    } else {
      throw UsageError("unknown --method '" + a.method + "'");
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoOtherClass) throw;
    j["p"] = a.norm;
    j["success"] = false;
    j["distance"] = nullptr;
    j["witness"] = nullptr;
    emit(common, out, j.dump(2) + "\n");
    err << e.what() << "\n";
    return kExitFailed;
  }
  const MinimalPerturbation& m = *found;
  j["p"] = m.p;
  j["success"] = true;
  j["distance"] = m.distance;
  j["distance_power"] = m.power.get_str();
  j["witness"] = image_json(m.witness);
  emit(common, out, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_estimate(const EstimateArgs& a, const Common& common, std::ostream& out) {
  const SpaceParams params{a.n, a.h, a.b};
  params.validate();
  const ClassifierHandle c = parse_classifier_spec(params, a.classifier, common.cap_images);
  FractionRequest req;
  req.threads = common.threads;
  req.limits.space_cap = common.cap_images;
  if (a.method == "monte_carlo") {
    if (a.samples == 0) throw UsageError("--samples must be positive");
    req.method = RobustMethod::MonteCarlo;
    req.samples = a.samples;
    req.seed = a.seed;
  } else if (a.method == "exhaustive") {
    req.method = RobustMethod::Exhaustive;
  } else if (a.method == "analytic") {
    req.method = RobustMethod::Analytic;
  } else {
    throw UsageError("unknown --method '" + a.method + "'");
  }
  const RobustnessReport r = class_robust_fraction(c, a.label, PerturbationBudget::from_size(a.norm, a.size), req);
  if (common.format == "csv") {
    emit(common, out, report_csv_header() + "\n" + report_to_csv(r) + "\n");
  } else {
    ordered_json j;
    j["config"] = {{"command", "estimate"}, {"n", a.n},           {"h", a.h},
                   {"b", a.b},              {"classifier", a.classifier}, {"label", a.label},
                   {"norm", a.norm},        {"size", a.size},     {"method", a.method},
                   {"samples", a.samples},  {"seed", a.seed}};
    j["report"] = ordered_json::parse(report_to_json(r));
    emit(common, out, j.dump(2) + "\n");
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, Common& common, const std::vector<std::string>& formats) {
  cmd->add_option("--format", common.format, "Output format")->check(CLI::IsMember(formats));
  cmd->add_option("--output", common.output, "Write output to this file instead of stdout");
  cmd->add_option("--threads", common.threads, "Worker threads (default: ROBUSTNESS_ENVELOPE_THREADS or all cores)");
  cmd->add_option("--cap-images", common.cap_images, "Largest space enumerated exhaustively")->check(CLI::PositiveNumber);
  common.format = formats.front();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robustness bounds, verification suites, attacks and estimates over discrete image spaces", "robenv"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  Common bounds_common;
  BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "Bounds on attainable robustness, one row per norm");
  bounds->add_option("--r", bounds_args.r, "Target robust fraction in (0,1)")->required();
  bounds->add_option("--n", bounds_args.n, "Image side length")->required()->check(CLI::PositiveNumber);
  bounds->add_option("--h", bounds_args.h, "Channels per pixel")->required()->check(CLI::PositiveNumber);
  bounds->add_option("--b", bounds_args.b, "Bit depth")->required()->check(CLI::PositiveNumber);
  bounds->add_option("--p", bounds_args.p_list, "Norm orders, comma separated")->delimiter(',')->check(CLI::NonNegativeNumber);
  add_common(bounds, bounds_common, {"csv", "json"});

  Common verify_common;
  VerifyArgs verify_args;
  std::vector<std::string> suite_choices = suite_names();
  suite_choices.push_back("all");
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", verify_args.suite, "Suite name")->required()->check(CLI::IsMember(suite_choices));
  verify->add_option("--seed", verify_args.seed, "Seed for randomized sweeps");
  verify->add_option("--mutant", verify_args.mutant, "Replace one inequality with a deliberately wrong variant")
      ->check(CLI::IsMember(mutant_names()));
  verify->add_option("--cap-subsets", verify_args.cap_subsets, "Largest exhaustive subset sweep")->check(CLI::PositiveNumber);
  verify->add_option("--c", verify_args.c_grid, "Override the c (or radius) grid, comma separated")->delimiter(',');
  verify->add_option("--samples", verify_args.samples, "Override random subset and failure-rate sample counts");
  add_common(verify, verify_common, {"text", "json"});

  Common attack_common;
  AttackArgs attack_args;
  auto* attack = app.add_subcommand("attack", "Find a perturbation that changes an image's label");
  attack->add_option("--image", attack_args.image, "Image JSON file ('-' for stdin)")->required();
  attack->add_option("--classifier", attack_args.classifier, "Classifier spec");
  attack->add_option("--method", attack_args.method, "minimal, sum or findpert")
      ->check(CLI::IsMember({"minimal", "sum", "findpert"}));
  attack->add_option("--norm,--p", attack_args.norm, "Norm order for minimal attacks")->check(CLI::NonNegativeNumber);
  attack->add_option("--radius", attack_args.radius, "L2 search radius for findpert")->check(CLI::NonNegativeNumber);
  attack->add_option("--seed", attack_args.seed, "Seed for findpert");
  add_common(attack, attack_common, {"json"});

  Common estimate_common;
  EstimateArgs estimate_args;
  auto* estimate = app.add_subcommand("estimate", "Estimate the robust fraction of one class");
  estimate->add_option("--n", estimate_args.n, "Image side length")->required()->check(CLI::PositiveNumber);
  estimate->add_option("--h", estimate_args.h, "Channels per pixel")->required()->check(CLI::PositiveNumber);
  estimate->add_option("--b", estimate_args.b, "Bit depth")->required()->check(CLI::PositiveNumber);
  estimate->add_option("--classifier", estimate_args.classifier, "Classifier spec");
  estimate->add_option("--label", estimate_args.label, "Class label")->check(CLI::NonNegativeNumber);
  estimate->add_option("--norm,--p", estimate_args.norm, "Norm order")->check(CLI::NonNegativeNumber);
  estimate->add_option("--size", estimate_args.size, "Perturbation budget")->required()->check(CLI::NonNegativeNumber);
  estimate->add_option("--method", estimate_args.method, "monte_carlo, exhaustive or analytic")
      ->check(CLI::IsMember({"monte_carlo", "exhaustive", "analytic"}));
  auto* samples_opt = estimate->add_option("--samples", estimate_args.samples, "Monte Carlo samples");
  auto* seed_opt = estimate->add_option("--seed", estimate_args.seed, "Monte Carlo seed");
  add_common(estimate, estimate_common, {"json", "csv"});

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n" << "run 'robenv --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (bounds->parsed()) return cmd_bounds(bounds_args, bounds_common, out);
    if (verify->parsed()) return cmd_verify(verify_args, verify_common, out, err);
    if (attack->parsed()) {
      if (attack_args.method == "findpert" && attack->count("--seed") == 0) {
        throw UsageError("--method findpert needs --seed");
      }
      return cmd_attack(attack_args, attack_common, out, err);
    }
    if (estimate->parsed()) {
      if (estimate_args.method == "monte_carlo" && (samples_opt->count() == 0 || seed_opt->count() == 0)) {
        throw UsageError("Monte Carlo estimates need --samples and --seed");
      }
      return cmd_estimate(estimate_args, estimate_common, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace robenv::cli
