// Copyright 2026 The postfid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "postfid/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "postfid/config.hpp"
#include "postfid/errors.hpp"
#include "postfid/postselect.hpp"

namespace postfid::cli {

namespace {

using nlohmann::json;

std::string fixed12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

GateSetup build_gate(const SweepConfig& config) {
  if (config.gate == "cs") return build_cs(CsGateSpec::basis(1, 1));
  const double norm = std::sqrt(config.alpha * config.alpha + config.beta * config.beta + config.gamma * config.gamma);
  NsGateSpec spec;
  spec.alpha = config.alpha / norm;
  spec.beta = config.beta / norm;
  spec.gamma = config.gamma / norm;
  return build_ns(spec);
}

// Ideal and lossy compound counters on a circuit's detection modes, built the
// same way fidelity_report builds them.
struct Detection {
  PomSet ideal;
  PomSet lossy;
};

Detection detection_for(const Circuit& circuit, double eta) {
  const int cutoff = circuit.system().cutoff();
  std::vector<PomSet> ideal;
  std::vector<PomSet> lossy;
  for (const auto& mode : circuit.detection_modes()) {
    ideal.push_back(ideal_counter_pom(mode, cutoff));
    lossy.push_back(lossy_counter_pom(mode, eta, cutoff));
  }
  return Detection{compound_pom(ideal, cutoff), compound_pom(lossy, cutoff)};
}

std::vector<double> validation_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(0.05 * i);
  return grid;
}

CheckResult check_pom_completeness() {
  CheckResult r{"pom-completeness", true, {}};
  double worst = 0.0;
  for (double eta : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    for (int cutoff = 1; cutoff <= 5; ++cutoff) {
      worst = std::max(worst, ideal_counter_pom("d", cutoff).completeness_defect());
      worst = std::max(worst, lossy_counter_pom("d", eta, cutoff).completeness_defect());
    }
    const std::vector<PomSet> pair{lossy_counter_pom("a", eta, 2), lossy_counter_pom("b", eta, 2)};
    worst = std::max(worst, compound_pom(pair, 3).completeness_defect());
  }
  r.passed = worst <= tolerance();
  r.detail = "max defect " + sci(worst);
  return r;
}

CheckResult check_duality() {
  CheckResult r{"retro-duality", true, {}};
  double worst = 0.0;
  for (double eta : {0.2, 0.5, 0.9}) {
    for (int cutoff = 1; cutoff <= 5; ++cutoff) {
      const PomSet ideal = ideal_counter_pom("d", cutoff);
      const RetroWeightTable w = retro_weights(lossy_counter_pom("d", eta, cutoff), ideal);
      const KrausChannel loss = loss_kraus(eta, cutoff);
      for (int k = 0; k <= cutoff; ++k) {
        const PureState in = PureState::basis_state(ideal.system_ptr(), std::array<int, 1>{k});
        const HermitianOperator out = predict(in.density(), loss);
        for (std::size_t l = 0; l < ideal.size(); ++l) {
          const double forward = (ideal[l].op.matrix() * out.matrix()).trace().real();
          worst = std::max(worst, std::abs(forward - w.weight(static_cast<std::size_t>(k), l)));
        }
      }
    }
  }
  r.passed = worst <= 1e-12;
  r.detail = "max |pi^r(k|l) - P^p(l|k)| " + sci(worst);
  return r;
}

CheckResult check_two_path(const NsLayout& layout) {
  CheckResult r{"two-path-consistency", true, {}};
  NsGateSpec spec;
  spec.layout = layout;
  const GateSetup ns = build_ns(spec);
  const HermitianOperator rho12 = joint_state(ns.circuit, ns.input);
  double state_gap = 0.0;
  double fidelity_gap = 0.0;
  for (double eta : validation_grid()) {
    const Detection det = detection_for(ns.circuit, eta);
    const RetroWeightTable w = retro_weights(det.lossy, det.ideal);
    const ConditionalOutput direct = conditional_state(rho12, det.lossy[det.lossy.index_of(ns.correct)]);
    const ConditionalOutput mixture = imperfect_output(rho12, det.ideal, w, ns.correct);
    state_gap = std::max(state_gap, (direct.state.matrix() - mixture.state.matrix()).cwiseAbs().maxCoeff());
    const FidelityReport report = fidelity_report(ns.circuit, ns.input, ns.desired, ns.correct, eta);
    fidelity_gap = std::max(fidelity_gap, std::abs(report.F_o - report.F_o_decomposed));
  }
  r.passed = state_gap <= 1e-12 && fidelity_gap <= 1e-12;
  r.detail = "state gap " + sci(state_gap) + ", F_o gap " + sci(fidelity_gap);
  return r;
}

// The two-state example: |+> = (|1> + |2>)/sqrt(2).
struct PmaxDemo {
  double plus_contains_one = 0.0;
  double one_contains_plus = 0.0;
  double overlap = 0.0;
};

PmaxDemo pmax_demo() {
  auto system = ModeSystem::make({"m"}, 2);
  const PureState one = PureState::basis_state(system, std::array<int, 1>{1});
  Vector plus_amps = Vector::Zero(3);
  plus_amps(static_cast<Eigen::Index>(system->index_of(std::array<int, 1>{1}))) = 1.0;
  plus_amps(static_cast<Eigen::Index>(system->index_of(std::array<int, 1>{2}))) = 1.0;
  const PureState plus = PureState::normalized(system, plus_amps);
  PmaxDemo demo;
  demo.plus_contains_one = pmax_extract(plus.density(), one).p_max;
  demo.one_contains_plus = pmax_extract(one.density(), plus).p_max;
  demo.overlap = plus.density().expectation(one);
  return demo;
}

// Largest p with rho - p|psi><psi| positive semidefinite, by bisection.
double bisect_pmax(const HermitianOperator& rho, const PureState& psi) {
  const Matrix proj = psi.amplitudes() * psi.amplitudes().adjoint();
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (min_eigenvalue(rho.matrix() - mid * proj) >= -tolerance()) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

CheckResult check_pmax() {
  CheckResult r{"pmax-reference", true, {}};
  const PmaxDemo demo = pmax_demo();
  auto system = ModeSystem::make({"m"}, 2);
  const PureState one = PureState::basis_state(system, std::array<int, 1>{1});
  Vector plus_amps = Vector::Zero(3);
  plus_amps(1) = 1.0;
  plus_amps(2) = 1.0;
  const PureState plus = PureState::normalized(system, plus_amps);
  const double oracle_a = bisect_pmax(plus.density(), one);
  const double oracle_b = bisect_pmax(one.density(), plus);
  const double self = pmax_extract(plus.density(), plus).p_max;
  r.passed = std::abs(demo.plus_contains_one - oracle_a) <= 1e-9 && std::abs(demo.one_contains_plus) <= 1e-12 &&
             std::abs(oracle_b) <= 1e-9 && std::abs(self - 1.0) <= 1e-12;
  r.detail = "pmax(|+><+|,|1>) " + fixed12(demo.plus_contains_one) + " (bisection " + fixed12(oracle_a) +
             "), pmax(|1><1|,|+>) " + fixed12(demo.one_contains_plus) + ", pmax(rho,rho) " + fixed12(self);
  return r;
}

CheckResult check_ns_sign_flip(const NsLayout& layout) {
  CheckResult r{"ns-sign-flip", true, {}};
  std::mt19937_64 rng(20260501);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  double worst_p = 0.0;
  const double expected_p = kNsAncillaReflectivity;
  for (int trial = 0; trial < 50; ++trial) {
    Complex a(gauss(rng), gauss(rng));
    Complex b(gauss(rng), gauss(rng));
    Complex c(gauss(rng), gauss(rng));
    const double n = std::sqrt(std::norm(a) + std::norm(b) + std::norm(c));
    NsGateSpec spec{a / n, b / n, c / n, layout};
    const GateSetup ns = build_ns(spec);
    const Detection det = detection_for(ns.circuit, 1.0);
    const HermitianOperator rho12 = joint_state(ns.circuit, ns.input);
    const ConditionalOutput out = conditional_state(rho12, det.ideal[det.ideal.index_of(ns.correct)]);
    worst = std::max(worst, 1.0 - overlap_fidelity(ns.desired, out.state));
    worst_p = std::max(worst_p, std::abs(out.click_probability - expected_p));
  }
  r.passed = worst <= 1e-10 && worst_p <= 1e-10;
  r.detail = "max 1 - F " + sci(worst) + ", max |p_c - (3-sqrt2)/7| " + sci(worst_p);
  return r;
}

CheckResult check_cs_truth_table(const NsLayout& layout) {
  CheckResult r{"cs-truth-table", true, {}};
  std::vector<CsGateSpec> inputs;
  for (int c = 0; c <= 1; ++c) {
    for (int t = 0; t <= 1; ++t) inputs.push_back(CsGateSpec::basis(c, t));
  }
  CsGateSpec superposition;
  superposition.amplitudes = {0.0, 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0)};
  inputs.push_back(superposition);
  double worst = 0.0;
  for (auto& spec : inputs) {
    spec.layout = layout;
    const GateSetup cs = build_cs(spec);
    const Detection det = detection_for(cs.circuit, 1.0);
    const HermitianOperator rho12 = joint_state(cs.circuit, cs.input);
    const ConditionalOutput out = conditional_state(rho12, det.ideal[det.ideal.index_of(cs.correct)]);
    worst = std::max(worst, 1.0 - overlap_fidelity(cs.desired, out.state));
  }
  r.passed = worst <= 1e-10;
  r.detail = "max 1 - F over 4 basis inputs and (|01>+|11>)/sqrt2: " + sci(worst);
  return r;
}

CheckResult check_fidelity_chain(const NsLayout& layout) {
  CheckResult r{"fidelity-chain", true, {}};
  NsGateSpec spec;
  spec.layout = layout;
  const std::vector<double> grid = validation_grid();
  const auto reports = ns_fidelity_sweep(spec, grid);
  double worst_gap = 0.0;
  for (const auto& rep : reports) {
    const bool chain = rep.F_r >= -1e-12 && rep.F_r <= rep.F_c + 1e-12 && rep.F_c <= rep.F_o + 1e-12 &&
                       rep.F_o <= 1.0 + 1e-12;
    if (!chain) r.passed = false;
    worst_gap = std::max(worst_gap, std::abs(rep.F_c - rep.F_r));
  }
  if (!(worst_gap <= 1e-10)) r.passed = false;
  r.detail = "20 points, max |F_c - F_r| " + sci(worst_gap);
  return r;
}

template <typename F>
CheckResult guarded(const std::string& name, F&& check) {
  try {
    return check();
  } catch (const std::exception& e) {
    return CheckResult{name, false, std::string("exception: ") + e.what()};
  }
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  file << text;
  file.flush();
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

void apply_tolerance_env() {
  const char* env = std::getenv("POSTFID_TOL");
  if (env == nullptr || *env == '\0') return;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(env, &used);
  } catch (const std::exception&) {
    throw UsageError(std::string("POSTFID_TOL is not a number: '") + env + "'");
  }
  if (used != std::string(env).size()) throw UsageError(std::string("POSTFID_TOL is not a number: '") + env + "'");
  try {
    set_tolerance(value);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("POSTFID_TOL: ") + e.what());
  }
}

}  // namespace

void check_config(const SweepConfig& config) {
  if (config.gate != "ns" && config.gate != "cs") throw UsageError("unknown gate '" + config.gate + "'");
  if (config.format != "csv" && config.format != "json") throw UsageError("unknown format '" + config.format + "'");
  if (!(config.eta_start >= 0.0 && config.eta_start <= config.eta_end && config.eta_end <= 1.0)) {
    throw UsageError("invalid eta range: need 0 <= eta-start <= eta-end <= 1");
  }
  if (config.eta_steps < 1) throw UsageError("eta-steps must be at least 1");
  if (config.eta_steps == 1 && config.eta_start != config.eta_end) {
    throw UsageError("a single eta step needs eta-start == eta-end");
  }
  for (double a : {config.alpha, config.beta, config.gamma}) {
    if (!std::isfinite(a)) throw UsageError("amplitudes must be finite");
  }
  if (config.alpha == 0.0 && config.beta == 0.0 && config.gamma == 0.0) {
    throw UsageError("amplitudes are all zero");
  }
}

std::vector<double> eta_grid(const SweepConfig& config) {
  check_config(config);
  std::vector<double> grid;
  const int n = config.eta_steps;
  for (int i = 0; i < n; ++i) {
    if (i == n - 1) {
      grid.push_back(config.eta_end);
    } else {
      grid.push_back(config.eta_start + (config.eta_end - config.eta_start) * i / (n - 1));
    }
  }
  return grid;
}

void load_config_file(const std::string& path, SweepConfig& config) {
  std::ifstream file(path);
  if (!file) throw UsageError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(file);
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file '" + path + "' must hold a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "gate") {
        config.gate = value.get<std::string>();
      } else if (key == "alpha") {
        config.alpha = value.get<double>();
      } else if (key == "beta") {
        config.beta = value.get<double>();
      } else if (key == "gamma") {
        config.gamma = value.get<double>();
      } else if (key == "eta_start") {
        config.eta_start = value.get<double>();
      } else if (key == "eta_end") {
        config.eta_end = value.get<double>();
      } else if (key == "eta_steps") {
        config.eta_steps = value.get<int>();
      } else if (key == "out") {
        config.out = value.get<std::string>();
      } else if (key == "format") {
        config.format = value.get<std::string>();
      } else {
        throw UsageError("config file '" + path + "': unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
}

std::vector<FidelityReport> run_sweep(const SweepConfig& config) {
  const std::vector<double> grid = eta_grid(config);
  const GateSetup gate = build_gate(config);
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<FidelityReport> reports(grid.size());
  for (std::size_t start = 0; start < grid.size(); start += workers) {
    const std::size_t end = std::min(grid.size(), start + workers);
    std::vector<std::future<FidelityReport>> batch;
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, [&gate, eta = grid[i]] {
        return fidelity_report(gate.circuit, gate.input, gate.desired, gate.correct, eta);
      }));
    }
    for (std::size_t i = start; i < end; ++i) reports[i] = batch[i - start].get();
  }
  return reports;
}

std::string format_csv(const std::vector<FidelityReport>& reports) {
  std::string text = "eta,p_click,F_r,F_c,F_o\n";
  for (const auto& r : reports) {
    text += fixed12(r.eta) + "," + fixed12(r.click_probability) + "," + fixed12(r.F_r) + "," + fixed12(r.F_c) + "," +
            fixed12(r.F_o) + "\n";
  }
  return text;
}

std::string format_json(const SweepConfig& config, const std::vector<FidelityReport>& reports) {
  json rows = json::array();
  for (const auto& r : reports) {
    json incorrect = json::array();
    for (const auto& term : r.incorrect) {
      incorrect.push_back({{"label", term.label.counts},
                           {"retro_probability", term.retro_probability},
                           {"p_max", term.p_max},
                           {"overlap", term.overlap}});
    }
    rows.push_back({{"eta", r.eta},
                    {"click_probability", r.click_probability},
                    {"F_r", r.F_r},
                    {"F_c", r.F_c},
                    {"F_o", r.F_o},
                    {"F_o_decomposed", r.F_o_decomposed},
                    {"perfect_probability", r.perfect_probability},
                    {"lumped_p_max", r.lumped_p_max},
                    {"incorrect", std::move(incorrect)}});
  }
  json doc = {{"gate", config.gate}, {"reports", std::move(rows)}};
  if (config.gate == "ns") {
    doc["amplitudes"] = {config.alpha, config.beta, config.gamma};
  }
  return doc.dump(2) + "\n";
}

std::vector<CheckResult> run_validation(const ValidateOptions& options) {
  const NsLayout& layout = options.ns_layout;
  std::vector<CheckResult> results;
  results.push_back(guarded("pom-completeness", check_pom_completeness));
  results.push_back(guarded("retro-duality", check_duality));
  results.push_back(guarded("two-path-consistency", [&] { return check_two_path(layout); }));
  results.push_back(guarded("pmax-reference", check_pmax));
  results.push_back(guarded("ns-sign-flip", [&] { return check_ns_sign_flip(layout); }));
  results.push_back(guarded("cs-truth-table", [&] { return check_cs_truth_table(layout); }));
  results.push_back(guarded("fidelity-chain", [&] { return check_fidelity_chain(layout); }));
  return results;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fidelity of postselecting linear-optical devices with imperfect photodetectors", "postfid"};
  app.require_subcommand(1, 1);

  SweepConfig config;
  std::string config_path;
  auto* sweep = app.add_subcommand("sweep", "Fidelity measures over a range of detector efficiencies");
  auto* gate_opt = sweep->add_option("--gate", config.gate, "Device: ns or cs (cs uses input |11>)");
  auto* alpha_opt = sweep->add_option("--alpha", config.alpha, "NS amplitude of |0>");
  auto* beta_opt = sweep->add_option("--beta", config.beta, "NS amplitude of |1>");
  auto* gamma_opt = sweep->add_option("--gamma", config.gamma, "NS amplitude of |2>");
  auto* start_opt = sweep->add_option("--eta-start", config.eta_start, "First efficiency");
  auto* end_opt = sweep->add_option("--eta-end", config.eta_end, "Last efficiency");
  auto* steps_opt = sweep->add_option("--eta-steps", config.eta_steps, "Number of grid points");
  auto* out_opt = sweep->add_option("--out", config.out, "Output file (default: standard output)");
  auto* format_opt = sweep->add_option("--format", config.format, "csv or json");
  sweep->add_option("--config", config_path, "JSON file with the same keys; flags take precedence");

  std::vector<double> check_etas{0.3, 0.6, 0.9};
  std::string check_out;
  std::string check_format = "csv";
  auto* cs_check = app.add_subcommand("cs-check", "Compare F_r of the CS gate with the squared F_r of the NS gate");
  cs_check->add_option("--eta", check_etas, "Efficiencies to check")->expected(1, -1);
  cs_check->add_option("--out", check_out, "Output file (default: standard output)");
  cs_check->add_option("--format", check_format, "csv or json");

  auto* pmax = app.add_subcommand("pmax-demo", "P^max for the two-state reference example");

  std::string fault = "none";
  auto* validate = app.add_subcommand("validate", "Run the invariant suite");
  validate->add_option("--inject-fault", fault)->group("")->check(CLI::IsMember({"none", "bs-sign"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    apply_tolerance_env();

    if (*sweep) {
      if (!config_path.empty()) {
        // Flags win: remember what was given explicitly, load the file, then
        // restore the explicit values.
        const SweepConfig from_flags = config;
        load_config_file(config_path, config);
        if (gate_opt->count()) config.gate = from_flags.gate;
        if (alpha_opt->count()) config.alpha = from_flags.alpha;
        if (beta_opt->count()) config.beta = from_flags.beta;
        if (gamma_opt->count()) config.gamma = from_flags.gamma;
        if (start_opt->count()) config.eta_start = from_flags.eta_start;
        if (end_opt->count()) config.eta_end = from_flags.eta_end;
        if (steps_opt->count()) config.eta_steps = from_flags.eta_steps;
        if (out_opt->count()) config.out = from_flags.out;
        if (format_opt->count()) config.format = from_flags.format;
      }
      check_config(config);
      const auto reports = run_sweep(config);
      write_output(config.out, config.format == "csv" ? format_csv(reports) : format_json(config, reports), out);
      return kExitOk;
    }

    if (*cs_check) {
      if (check_format != "csv" && check_format != "json") throw UsageError("unknown format '" + check_format + "'");
      for (double eta : check_etas) {
        if (!(eta >= 0.0 && eta <= 1.0)) throw UsageError("eta must lie in [0, 1]");
      }
      std::vector<CompositionCheck> checks(check_etas.size());
      std::vector<std::future<CompositionCheck>> futures;
      for (double eta : check_etas) futures.push_back(std::async(std::launch::async, cs_composition_check, eta));
      for (std::size_t i = 0; i < futures.size(); ++i) checks[i] = futures[i].get();

      std::string text;
      if (check_format == "csv") {
        text = "eta,F_r_cs,F_r_ns,F_r_ns_squared,discrepancy\n";
        for (const auto& c : checks) {
          text += fixed12(c.eta) + "," + fixed12(c.F_r_cs) + "," + fixed12(c.F_r_ns) + "," +
                  fixed12(c.F_r_ns_squared) + "," + fixed12(c.discrepancy) + "\n";
        }
      } else {
        json rows = json::array();
        for (const auto& c : checks) {
          rows.push_back({{"eta", c.eta},
                          {"F_r_cs", c.F_r_cs},
                          {"F_r_ns", c.F_r_ns},
                          {"F_r_ns_squared", c.F_r_ns_squared},
                          {"discrepancy", c.discrepancy}});
        }
        text = rows.dump(2) + "\n";
      }
      write_output(check_out, text, out);
      return kExitOk;
    }

    if (*pmax) {
      const PmaxDemo demo = pmax_demo();
      out << "pmax(|+><+|, |1>) = " << fixed12(demo.plus_contains_one) << "\n";
      out << "pmax(|1><1|, |+>) = " << fixed12(demo.one_contains_plus) << "\n";
      out << "<1|+><+|1>        = " << fixed12(demo.overlap) << "\n";
      return kExitOk;
    }

    if (*validate) {
      ValidateOptions options;
      if (fault == "bs-sign") options.ns_layout.signal_splitter = GreySide::second;
      const auto results = run_validation(options);
      bool all = true;
      for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
        all = all && r.passed;
      }
      return all ? kExitOk : kExitFailure;
    }
  } catch (const UsageError& e) {
    err << "postfid: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "postfid: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace postfid::cli
