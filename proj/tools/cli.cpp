#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "convshield/analysis.hpp"
#include "convshield/bounds.hpp"
#include "convshield/error.hpp"
#include "convshield/experiments.hpp"
#include "convshield/init.hpp"
#include "convshield/nn/arch_json.hpp"
#include "convshield/nn/forward.hpp"
#include "convshield/nn/presets.hpp"
#include "convshield/report.hpp"
#include "convshield/rng.hpp"
#include "convshield/simd/dispatch.hpp"

namespace convshield::cli {

namespace {

std::size_t default_threads() {
  if (const char* env = std::getenv("CONVSHIELD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> values;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    std::istringstream cell(token);
    T v{};
    if (!(cell >> v) || !(cell >> std::ws).eof())
      throw InvalidArgument(std::string("invalid ") + what + " list '" + text + "'");
    values.push_back(v);
  }
  if (values.empty()) throw InvalidArgument(std::string("empty ") + what + " list");
  return values;
}

struct ArchOptions {
  std::string preset;
  std::string arch_file;
  std::string strides;
  std::size_t classes = 10;

  void attach(CLI::App* cmd, const std::string& default_preset = "") {
    preset = default_preset;
    auto* p = cmd->add_option("--preset", preset, "toy, alexnet, vgg16, resnet18, preactresnet18");
    auto* a = cmd->add_option("--arch", arch_file, "architecture JSON file");
    p->excludes(a);
    cmd->add_option("--strides", strides, "stage stride configuration, e.g. 1,1,2,2");
    cmd->add_option("--classes", classes, "classifier outputs for presets")->check(CLI::PositiveNumber);
  }

  nn::ArchSpec load() const {
    nn::ArchSpec arch;
    if (!arch_file.empty()) {
      arch = nn::load_arch_file(arch_file);
    } else if (!preset.empty()) {
      arch = nn::make_preset(nn::parse_preset(preset), classes);
    } else {
      throw InvalidArgument("one of --preset or --arch is required");
    }
    if (!strides.empty()) arch = analysis::rewrite_strides(arch, analysis::StrideConfig::parse(strides));
    return arch;
  }
};

struct OutputOptions {
  std::string format = "json";
  std::string path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", path, "write the report here instead of stdout");
  }
  report::Format fmt() const { return report::parse_format(format); }

  void emit(const std::string& text, std::ostream& out) const {
    if (path.empty()) {
      out << text;
      return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write '" + path + "'");
    file << text;
  }
};

struct InputOptions {
  std::size_t size = 32;
  std::size_t upsample = 1;
  std::string upsample_mode = "nearest";

  void attach(CLI::App* cmd, bool with_upsample) {
    cmd->add_option("--input", size, "input height and width")->check(CLI::PositiveNumber);
    if (with_upsample) {
      cmd->add_option("--upsample", upsample, "upsample the input by this factor first")
          ->check(CLI::PositiveNumber);
      cmd->add_option("--upsample-mode", upsample_mode, "nearest or bilinear")
          ->check(CLI::IsMember({"nearest", "bilinear"}));
    }
  }
  nn::ArchSpec apply(nn::ArchSpec arch) const {
    if (upsample > 1) arch = analysis::with_input_upsampling(arch, nn::parse_upsample_mode(upsample_mode), upsample);
    return arch;
  }
  nn::Extent extent() const { return {size, size}; }
};

struct InitOptions {
  std::string kind = "xavier_normal";
  double normal_std = 0.05;
  double uniform_bound = 0.05;

  void attach(CLI::App* cmd) {
    cmd->add_option("--init", kind, "normal, uniform, xavier_normal, xavier_uniform");
    cmd->add_option("--normal-std", normal_std, "std of the normal init")->check(CLI::NonNegativeNumber);
    cmd->add_option("--uniform-bound", uniform_bound, "bound of the uniform init")
        ->check(CLI::NonNegativeNumber);
  }
  InitStrategy strategy() const {
    InitStrategy s;
    s.kind = parse_init_kind(kind);
    s.stddev = normal_std;
    s.low = -uniform_bound;
    s.high = uniform_bound;
    return s;
  }
};

std::vector<Tensor> random_images(const nn::ArchSpec& arch, std::size_t count, std::size_t size,
                                  std::uint64_t seed) {
  const Shape shape = analysis::default_input_shape(arch, {size, size});
  std::vector<Tensor> images;
  for (std::size_t i = 0; i < count; ++i) {
    RngStream rng(derive_seed(seed, seed_purpose::kBaseInput), i);
    images.push_back(sample_uniform(shape, 0.0, 1.0, rng));
  }
  return images;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feature-size robustness toolkit: bounds, perturbation experiments and architecture analysis",
               "convshield"};
  app.require_subcommand(1, 1);
  std::string simd_level;
  app.add_option("--simd", simd_level, "force a kernel set: scalar, avx2, avx512");

  // dims / rf / cost
  ArchOptions dims_arch, rf_arch, cost_arch, rewrite_arch, inv_arch, lip_arch;
  OutputOptions dims_out, rf_out, cost_out, rewrite_out, red_out, bound_out, sim_out, inv_out, lip_out;
  InputOptions dims_in, rf_in, cost_in;

  auto* dims = app.add_subcommand("dims", "feature map shape after every layer");
  dims_arch.attach(dims);
  dims_in.attach(dims, true);
  dims_out.attach(dims);

  auto* rf = app.add_subcommand("rf", "receptive field per conv layer");
  rf_arch.attach(rf);
  rf_in.attach(rf, true);
  rf_out.attach(rf);

  auto* cost = app.add_subcommand("cost", "flops, activation memory and parameters per layer");
  cost_arch.attach(cost);
  cost_in.attach(cost, true);
  cost_out.attach(cost);

  auto* rewrite = app.add_subcommand("rewrite", "change the first-conv stride of every stage");
  rewrite_arch.attach(rewrite);
  rewrite->get_option("--strides")->required();
  rewrite_out.attach(rewrite);

  std::size_t red_scale = 1, red_kernel = 1, red_len = 1;
  auto* red = app.add_subcommand("redundancy", "duplicate outputs after nearest upsampling (1-D)");
  red->add_option("--scale", red_scale, "upsampling factor")->required()->check(CLI::PositiveNumber);
  red->add_option("--kernel", red_kernel, "filter length")->required()->check(CLI::PositiveNumber);
  red->add_option("--len", red_len, "input length")->required()->check(CLI::PositiveNumber);
  red_out.attach(red);

  std::string bound_pool = "avg";
  std::size_t bound_h = 1, bound_w = 1;
  double bound_a = 0.0, bound_b = 0.0;
  std::optional<double> bound_p, bound_gamma;
  auto* bound = app.add_subcommand("bound", "tail bound for a pooled disturbance, or the minimal gamma");
  bound->add_option("--pool", bound_pool, "avg or max")->check(CLI::IsMember({"avg", "max"}));
  bound->add_option("--height", bound_h, "feature height H")->required()->check(CLI::PositiveNumber);
  bound->add_option("--width", bound_w, "feature width W")->required()->check(CLI::PositiveNumber);
  bound->add_option("--a", bound_a, "smallest disturbance value")->required();
  bound->add_option("--b", bound_b, "largest disturbance value")->required();
  auto* p_opt = bound->add_option("--p", bound_p, "target probability; prints the minimal gamma");
  auto* g_opt = bound->add_option("--gamma", bound_gamma, "deviation; prints the probability bound");
  p_opt->excludes(g_opt);
  bound_out.attach(bound);

  ArchOptions sim_arch;
  InitOptions sim_init, inv_init, lip_init;
  std::string sim_activation = "none", sim_pool = "both", sim_sizes = "16,32,64", sim_base = "uniform";
  double sim_epsilon = 0.1;
  std::size_t sim_trials = 1000, sim_threads = default_threads();
  std::uint64_t sim_seed = 0;
  bool sim_no_samples = false, sim_per_channel = false;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo perturbation propagation");
  sim_arch.attach(sim, "toy");
  sim_init.attach(sim);
  sim->add_option("--activation", sim_activation, "none or relu")->check(CLI::IsMember({"none", "relu"}));
  sim->add_option("--pool", sim_pool, "avg, max or both")->check(CLI::IsMember({"avg", "max", "both"}));
  sim->add_option("--epsilon", sim_epsilon, "perturbation radius")->check(CLI::NonNegativeNumber);
  sim->add_option("--trials", sim_trials, "perturbations per input size")->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "base seed");
  sim->add_option("--sizes", sim_sizes, "comma-separated square input sizes");
  sim->add_option("--threads", sim_threads, "worker threads (default CONVSHIELD_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  sim->add_option("--base-input", sim_base, "uniform or zeros")->check(CLI::IsMember({"uniform", "zeros"}));
  sim->add_flag("--no-samples", sim_no_samples, "omit per-trial samples");
  sim->add_flag("--per-channel", sim_per_channel, "include per-channel pooled disturbances");
  sim_out.attach(sim);

  std::string inv_epsilons = "0,0.01,0.02,0.03";
  std::size_t inv_inputs = 10, inv_trials = 100, inv_size = 32, inv_threads = default_threads();
  std::uint64_t inv_seed = 0;
  auto* inv = app.add_subcommand("invariance", "fraction of unchanged predictions under perturbation");
  inv_arch.attach(inv, "toy");
  inv_init.attach(inv);
  inv->add_option("--epsilons", inv_epsilons, "comma-separated budgets");
  inv->add_option("--inputs", inv_inputs, "number of random inputs")->check(CLI::PositiveNumber);
  inv->add_option("--trials", inv_trials, "perturbations per input and budget")->check(CLI::PositiveNumber);
  inv->add_option("--input", inv_size, "input height and width")->check(CLI::PositiveNumber);
  inv->add_option("--seed", inv_seed, "seed for weights, inputs and perturbations");
  inv->add_option("--threads", inv_threads, "worker threads")->check(CLI::PositiveNumber);
  inv_out.attach(inv);

  std::size_t lip_probes = 16, lip_pairs = 100, lip_size = 8;
  std::uint64_t lip_seed = 0;
  auto* lip = app.add_subcommand("lipschitz", "empirical lower bound on the l-inf Lipschitz constant");
  lip_arch.attach(lip, "toy");
  lip_init.attach(lip);
  lip->add_option("--probes", lip_probes, "number of random probe inputs")->check(CLI::PositiveNumber);
  lip->add_option("--pairs", lip_pairs, "probe pairs to sample")->check(CLI::PositiveNumber);
  lip->add_option("--input", lip_size, "input height and width")->check(CLI::PositiveNumber);
  lip->add_option("--seed", lip_seed, "seed for weights, probes and pairs");
  lip_out.attach(lip);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (!simd_level.empty()) {
      auto level = simd::parse_simd_level(simd_level);
      if (!level) throw InvalidArgument("unknown SIMD level '" + simd_level + "'");
      simd::set_active_level(*level);
    }

    if (dims->parsed()) {
      const auto arch = dims_in.apply(dims_arch.load());
      dims_out.emit(report::render_dims(arch, analysis::default_input_shape(arch, dims_in.extent()), dims_out.fmt()), out);
    } else if (rf->parsed()) {
      const auto arch = rf_in.apply(rf_arch.load());
      rf_out.emit(report::render(analysis::receptive_field(arch, rf_in.extent()), rf_out.fmt()), out);
    } else if (cost->parsed()) {
      const auto arch = cost_in.apply(cost_arch.load());
      cost_out.emit(report::render(analysis::cost(arch, cost_in.extent()), cost_out.fmt()), out);
    } else if (rewrite->parsed()) {
      rewrite_out.emit(nn::arch_to_json(rewrite_arch.load()) + "\n", out);
    } else if (red->parsed()) {
      red_out.emit(report::render(analysis::redundancy_profile(red_scale, red_kernel, red_len), red_out.fmt()), out);
    } else if (bound->parsed()) {
      if (!bound_p && !bound_gamma) throw InvalidArgument("bound needs --p or --gamma");
      const bounds::BoundQuery q{nn::parse_pool_kind(bound_pool), bound_h, bound_w, bound_a, bound_b,
                                 bound_gamma, bound_p};
      bound_out.emit(report::render(bounds::evaluate(q), bound_out.fmt()), out);
    } else if (sim->parsed()) {
      experiments::ExperimentConfig config;
      config.arch = sim_arch.load();
      config.init = sim_init.strategy();
      config.activation = nn::parse_activation_kind(sim_activation);
      config.epsilon = sim_epsilon;
      config.trials = sim_trials;
      config.base_seed = sim_seed;
      config.threads = sim_threads;
      config.base_input = sim_base == "zeros" ? experiments::BaseInputKind::kZeros
                                              : experiments::BaseInputKind::kUniformUnit;
      config.input_sizes.clear();
      for (auto s : parse_list<std::size_t>(sim_sizes, "size")) {
        require(s > 0, "input sizes must be positive");
        config.input_sizes.push_back({s, s});
      }
      std::vector<nn::PoolKind> kinds;
      if (sim_pool == "both") kinds = {nn::PoolKind::kAverage, nn::PoolKind::kMax};
      else kinds = {nn::parse_pool_kind(sim_pool)};
      const auto reports = experiments::run_pooling_arms(config, kinds);
      sim_out.emit(report::render(reports, sim_out.fmt(), {!sim_no_samples, sim_per_channel}), out);
    } else if (inv->parsed()) {
      const auto arch = inv_arch.load();
      const auto weights = nn::init_network(arch, inv_init.strategy(), inv_seed);
      const auto inputs = random_images(arch, inv_inputs, inv_size, inv_seed);
      const auto eps = parse_list<double>(inv_epsilons, "epsilon");
      const auto result =
          experiments::prediction_invariance(arch, weights, inputs, eps, inv_trials, inv_seed, inv_threads);
      inv_out.emit(report::render(result, inv_out.fmt()), out);
    } else if (lip->parsed()) {
      const auto arch = lip_arch.load();
      const auto weights = nn::init_network(arch, lip_init.strategy(), lip_seed);
      const auto probes = random_images(arch, lip_probes, lip_size, lip_seed);
      lip_out.emit(report::render(experiments::lipschitz_lower_bound(arch, weights, probes, lip_pairs, lip_seed),
                                  lip_out.fmt()),
                   out);
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace convshield::cli
