#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "polarorder/polarorder.hpp"

namespace {

using namespace polarorder;

SynthesisOptions make_options(std::optional<std::size_t> budget, bool exact) {
  SynthesisOptions opts;
  if (exact) {
    opts.budget.reset();
  } else if (budget) {
    opts.budget = *budget;
  }
  return opts;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << text;
}

int run_synth(const std::string& channel_path, const std::string& sequence_text,
              std::optional<std::size_t> budget, bool exact, const std::string& output_path) {
  Channel w = load_channel_file(channel_path);
  SignSequence seq(sequence_text);
  DeltaDistribution d = synthesize(delta_distribution(w), seq, make_options(budget, exact));

  nlohmann::json functionals;
  for (const Functional& f : built_in_functionals()) functionals[f.name()] = expectation_phi(d, f);
  nlohmann::json summary{{"sequence", seq.str()},     {"index", seq.index()},
                         {"atoms", d.size()},         {"mean", d.mean()},
                         {"bhattacharyya", b_distribution(d).mean()}, {"functionals", functionals}};
  std::cout << summary.dump(2) << "\n";

  std::string csv = delta_to_csv(d);
  if (output_path.empty()) {
    std::cout << csv;
  } else {
    write_text(output_path, csv);
  }
  return 0;
}

int run_order(const std::string& lhs_path, const std::string& rhs_path, const std::string& method,
              std::optional<double> tol) {
  Channel lhs = load_channel_file(lhs_path);
  Channel rhs = load_channel_file(rhs_path);
  double order_tol = tol.value_or(kStochasticTol);
  double feas_tol = tol.value_or(kFeasibilityTol);

  OrderingVerdict verdict;
  if (method == "icx") {
    verdict = icx_check(delta_distribution(lhs), delta_distribution(rhs), order_tol);
  } else if (method == "cx") {
    verdict = cx_check(delta_distribution(lhs), delta_distribution(rhs), kFeasibilityTol, order_tol);
  } else if (method == "cut") {
    verdict = cut_criterion(delta_distribution(lhs), delta_distribution(rhs), order_tol);
  } else if (method == "symmetric") {
    verdict = symmetric_convex_check(lhs, rhs, order_tol);
  } else if (method == "degradation") {
    verdict = degradation_check(rhs, lhs, feas_tol);
  } else if (method == "blackwell") {
    verdict.method = "blackwell";
    auto kernel = find_mean_preserving_kernel(delta_distribution(lhs), delta_distribution(rhs), feas_tol);
    verdict.holds = kernel.has_value();
    if (kernel) verdict.witness = std::move(*kernel);
  } else {
    throw CLI::ValidationError("--method", "unknown method '" + method + "'");
  }
  std::cout << verdict_to_json(verdict).dump(2) << "\n";
  return verdict.holds ? 0 : 1;
}

int run_infoset(const std::string& channel_path, int n, const std::string& phi_name, double eps,
                std::optional<std::size_t> budget, bool exact, unsigned threads,
                const std::string& output_path) {
  Channel w = load_channel_file(channel_path);
  Functional phi = Functional::parse(phi_name);
  InfoSet set = build_info_set(w, n, phi, eps, make_options(budget, exact), threads);
  std::cout << info_set_summary_json(set).dump(2) << "\n";
  std::string csv = info_set_report_csv(set);
  if (output_path.empty()) {
    std::cout << csv;
  } else {
    write_text(output_path, csv);
  }
  return 0;
}

int run_example_zbsc(double p, double resolution) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie strictly between 0 and 1");
  Channel z = make_z(p);
  Channel z_sym = symmetrize(z);
  double deg = threshold_bisect(0.0, 0.5, resolution, [&](double eps) {
    return degradation_check(z, make_bsc(eps)).holds;
  });
  double sym = threshold_bisect(0.0, 0.5, resolution, [&](double eps) {
    return symmetric_convex_check(make_bsc(eps), z).holds;
  });
  double sym_route = threshold_bisect(0.0, 0.5, resolution, [&](double eps) {
    return degradation_check(z_sym, make_bsc(eps)).holds;
  });
  char line[128];
  auto row = [&](const char* label, double value) {
    std::snprintf(line, sizeof(line), "%-34s %.9f\n", label, value);
    std::cout << line;
  };
  std::snprintf(line, sizeof(line), "Z(%g) vs BSC(eps) smallest-eps thresholds\n", p);
  std::cout << line;
  row("degradation (bisection)", deg);
  row("degradation closed form p/(1+p)", p / (1.0 + p));
  row("symmetric-convex (bisection)", sym);
  row("symmetric-convex closed form p/2", p / 2.0);
  row("symmetrized-degradation route", sym_route);
  std::snprintf(line, sizeof(line), "%-34s %s\n", "p/2 < p/(1+p)",
                p / 2.0 < p / (1.0 + p) ? "yes" : "no");
  std::cout << line;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delta-parameter toolkit for binary-input channels: polar synthesis, "
               "stochastic-order checks, and information-set construction"};
  app.require_subcommand(1);

  std::string channel_path, sequence_text, lhs_path, rhs_path, method, phi_name, output_path;
  std::optional<std::size_t> budget;
  std::optional<double> tol;
  bool exact = false;
  int n = 0;
  double eps = 0.0, p = 0.0, resolution = 1e-6;
  unsigned threads = 1;

  CLI::App* synth = app.add_subcommand("synth", "Synthesize the channel of a sign sequence");
  synth->add_option("--channel", channel_path, "channel JSON file")->required();
  synth->add_option("--sequence", sequence_text, "sign sequence over +/- (may be empty)");
  auto* synth_budget = synth->add_option("--budget", budget, "quantizer budget (default 256)")
                           ->check(CLI::PositiveNumber);
  synth->add_flag("--exact", exact, "disable quantization")->excludes(synth_budget);
  synth->add_option("--output", output_path, "write the distribution CSV here");

  CLI::App* order = app.add_subcommand("order", "Check a stochastic order between two channels");
  order->add_option("--lhs", lhs_path, "left channel JSON file (candidate smaller/degraded side)")
      ->required();
  order->add_option("--rhs", rhs_path, "right channel JSON file")->required();
  order->add_option("--method", method, "icx, cx, cut, degradation, blackwell, or symmetric")
      ->required();
  order->add_option("--tol", tol, "comparison/feasibility tolerance override");

  CLI::App* infoset = app.add_subcommand("infoset", "Build the information set of a channel");
  infoset->add_option("--channel", channel_path, "channel JSON file")->required();
  infoset->add_option("--n", n, "number of polarization levels")->required();
  infoset->add_option("--phi", phi_name, "functional name (e.g. capacity, power:3)")->required();
  infoset->add_option("--eps", eps, "membership threshold is 1-eps")->required();
  auto* infoset_budget = infoset->add_option("--budget", budget, "quantizer budget (default 256)")
                             ->check(CLI::PositiveNumber);
  infoset->add_flag("--exact", exact, "disable quantization")->excludes(infoset_budget);
  infoset->add_option("--threads", threads, "worker threads for the synthesis tree");
  infoset->add_option("--output", output_path, "write the report CSV here");

  CLI::App* zbsc = app.add_subcommand("example-zbsc", "Z-channel vs BSC threshold table");
  zbsc->add_option("--p", p, "Z-channel crossover probability, in (0,1)")->required();
  zbsc->add_option("--resolution", resolution, "bisection resolution (default 1e-6)");

  try {
    app.parse(argc, argv);
    if (synth->parsed()) return run_synth(channel_path, sequence_text, budget, exact, output_path);
    if (order->parsed()) return run_order(lhs_path, rhs_path, method, tol);
    if (infoset->parsed()) return run_infoset(channel_path, n, phi_name, eps, budget, exact, threads, output_path);
    if (zbsc->parsed()) return run_example_zbsc(p, resolution);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
