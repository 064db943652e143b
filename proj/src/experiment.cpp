#include "sparsejt/experiment.hpp"

#include "sparsejt/baselines.hpp"
#include "sparsejt/parallel.hpp"
#include "sparsejt/se_metrics.hpp"
#include "sparsejt/spca_core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace sparsejt {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  T v{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto r = std::from_chars(first, last, v);
  if (r.ec != std::errc() || r.ptr != last) config_error("bad value for '" + key + "': '" + text + "'");
  return v;
}

// Shortest representation that parses back to the same double.
std::string exact_number(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

struct Field {
  std::function<void(ExperimentSpec&, const std::string&)> set;
  std::function<std::string(const ExperimentSpec&)> get;
};

template <typename T>
Field net_field(T NetworkConfig::*member, const char* key) {
  return Field{
      [member, key](ExperimentSpec& s, const std::string& v) { s.net.*member = parse_value<T>(key, v); },
      [member](const ExperimentSpec& s) {
        if constexpr (std::is_floating_point_v<T>) {
          return exact_number(s.net.*member);
        } else {
          return std::to_string(s.net.*member);
        }
      }};
}

template <typename T>
Field spec_field(T ExperimentSpec::*member, const char* key) {
  return Field{[member, key](ExperimentSpec& s, const std::string& v) { s.*member = parse_value<T>(key, v); },
               [member](const ExperimentSpec& s) { return std::to_string(s.*member); }};
}

template <typename T>
Field override_field(T PlanOverride::*member, const char* key) {
  return Field{[member, key](ExperimentSpec& s, const std::string& v) {
                 s.plan_override.*member = parse_value<T>(key, v);
               },
               [member](const ExperimentSpec& s) { return std::to_string(s.plan_override.*member); }};
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + xs[i];
  return out;
}

// Keys in serialization order.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"L", net_field(&NetworkConfig::L, "L")},
      {"N", net_field(&NetworkConfig::N, "N")},
      {"K", net_field(&NetworkConfig::K, "K")},
      {"area_m", net_field(&NetworkConfig::area_m, "area_m")},
      {"P_dbm", net_field(&NetworkConfig::P_dbm, "P_dbm")},
      {"noise_dbm", net_field(&NetworkConfig::noise_dbm, "noise_dbm")},
      {"bandwidth_hz", net_field(&NetworkConfig::bandwidth_hz, "bandwidth_hz")},
      {"carrier_mhz", net_field(&NetworkConfig::carrier_mhz, "carrier_mhz")},
      {"h_rrh_m", net_field(&NetworkConfig::h_rrh_m, "h_rrh_m")},
      {"h_user_m", net_field(&NetworkConfig::h_user_m, "h_user_m")},
      {"tau", net_field(&NetworkConfig::tau, "tau")},
      {"p_ul_dbm", net_field(&NetworkConfig::p_ul_dbm, "p_ul_dbm")},
      {"tau_u", net_field(&NetworkConfig::tau_u, "tau_u")},
      {"tau_d", net_field(&NetworkConfig::tau_d, "tau_d")},
      {"tau_c", net_field(&NetworkConfig::tau_c, "tau_c")},
      {"C_bits_per_use", net_field(&NetworkConfig::C_bits_per_use, "C_bits_per_use")},
      {"S", net_field(&NetworkConfig::S, "S")},
      {"epsilon_sparse", net_field(&NetworkConfig::epsilon_sparse, "epsilon_sparse")},
      {"corr_r", net_field(&NetworkConfig::corr_r, "corr_r")},
      {"seed", net_field(&NetworkConfig::seed, "seed")},
      {"schemes", Field{[](ExperimentSpec& s, const std::string& v) { s.schemes = split_list(v); },
                        [](const ExperimentSpec& s) { return join(s.schemes); }}},
      {"sweep_axis", Field{[](ExperimentSpec& s, const std::string& v) {
                             if (v == "S") {
                               s.axis = SweepAxis::S;
                             } else if (v == "C") {
                               s.axis = SweepAxis::C;
                             } else {
                               config_error("sweep_axis must be S or C");
                             }
                           },
                           [](const ExperimentSpec& s) { return std::string(s.axis == SweepAxis::S ? "S" : "C"); }}},
      {"sweep_values", Field{[](ExperimentSpec& s, const std::string& v) {
                               s.sweep_values.clear();
                               for (const auto& item : split_list(v)) {
                                 s.sweep_values.push_back(parse_value<double>("sweep_values", item));
                               }
                             },
                             [](const ExperimentSpec& s) {
                               std::vector<std::string> xs;
                               for (double x : s.sweep_values) xs.push_back(exact_number(x));
                               return join(xs);
                             }}},
      {"drops", spec_field(&ExperimentSpec::n_drops, "drops")},
      {"fades", spec_field(&ExperimentSpec::n_fades, "fades")},
      {"out", Field{[](ExperimentSpec& s, const std::string& v) { s.out_path = v; },
                    [](const ExperimentSpec& s) { return s.out_path; }}},
      {"plan_U", override_field(&PlanOverride::U, "plan_U")},
      {"plan_B", override_field(&PlanOverride::B, "plan_B")},
      {"plan_B_bar", override_field(&PlanOverride::B_bar, "plan_B_bar")},
  };
  return table;
}

const Field* find_field(const std::string& key) {
  for (const auto& [k, f] : fields()) {
    if (k == key) return &f;
  }
  return nullptr;
}

double baseline_sparsity(const StackedPrecoder& f, const QuantizationPlan& plan, double eps) {
  const double mu = mu_epsilon(eps);
  double budget = plan.power_budget_sum();
  const double norm2 = f.squared_norm();
  const double scale = budget / norm2;
  double total = 0.0;
  for (int l = 0; l < f.L(); ++l) total += std::log2(scale * (f.rrh_power(l) / eps + norm2 / f.L()));
  return mu * total;
}

int scheme_rank(const std::string& s) {
  const auto& all = known_schemes();
  return static_cast<int>(std::find(all.begin(), all.end(), s) - all.begin());
}

}  // namespace

const std::vector<std::string>& known_schemes() {
  static const std::vector<std::string> names{"sparse_jt", "rcc_zf", "sc_zf"};
  return names;
}

void ExperimentSpec::validate() const {
  try {
    net.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (schemes.empty()) config_error("schemes must not be empty");
  for (const auto& s : schemes) {
    if (scheme_rank(s) >= static_cast<int>(known_schemes().size())) config_error("unknown scheme '" + s + "'");
  }
  if (n_drops < 1 || n_fades < 1) config_error("drops and fades must be >= 1");
  for (double v : sweep_values) {
    if (axis == SweepAxis::S) {
      if (v != std::floor(v) || v < 1 || v > net.L) config_error("S sweep values must be integers in [1, L]");
    } else if (!(v > 0.0)) {
      config_error("C sweep values must be positive");
    }
  }
  if (plan_override.U < 0 || plan_override.U > net.K || plan_override.B < 0 || plan_override.B_bar < 0) {
    config_error("plan override out of range");
  }
}

ExperimentSpec parse_spec(const std::string& text, const ExperimentSpec& base) {
  ExperimentSpec spec = base;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Field* f = find_field(key);
    if (f == nullptr) config_error("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    f->set(spec, value);
  }
  return spec;
}

ExperimentSpec load_spec(const std::string& path, const ExperimentSpec& base) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str(), base);
}

std::string serialize_spec(const ExperimentSpec& spec) {
  std::string out;
  for (const auto& [key, f] : fields()) out += key + " = " + f.get(spec) + "\n";
  return out;
}

ExperimentSpec preset(const std::string& name) {
  ExperimentSpec spec;
  if (name == "default") return spec;
  if (name == "large") {
    spec.net.L = 30;
    spec.net.N = 4;
    spec.net.K = 12;
    spec.net.C_bits_per_use = capacity_bits_per_use(3e9, 10e6);
    spec.plan_override = PlanOverride{6, 6, 12};
    spec.axis = SweepAxis::S;
    spec.sweep_values = {30, 24, 18, 12, 6};
    return spec;
  }
  if (name == "small") {
    spec.net.L = 10;
    spec.net.N = 2;
    spec.net.K = 6;
    spec.net.C_bits_per_use = 100.0;
    spec.net.S = 6;
    spec.axis = SweepAxis::S;
    spec.sweep_values = {10, 8, 6, 4, 2};
    spec.n_drops = 50;
    spec.n_fades = 4;
    return spec;
  }
  config_error("unknown preset '" + name + "'");
}

QuantizationPlan plan_for(const ExperimentSpec& spec, const NetworkConfig& net) {
  return make_plan(net, spec.plan_override);
}

std::vector<SchemeOutcome> evaluate_realization(const NetworkConfig& net,
                                                const QuantizationPlan& plan,
                                                const std::vector<std::string>& schemes,
                                                std::uint64_t seed, int drop, int fade,
                                                const SolverOptions& opt) {
  std::vector<SchemeOutcome> out;
  const double prefactor = net.training_prefactor();
  ChannelSet ch;
  std::string draw_error;
  try {
    ch = draw_realization(net, plan, seed, drop, fade);
  } catch (const std::exception& e) {
    draw_error = e.what();
  }

  const bool need_jt = std::any_of(schemes.begin(), schemes.end(),
                                   [](const std::string& s) { return s == "sparse_jt" || s == "sc_zf"; });
  SolverResult jt;
  std::string jt_error = draw_error;
  if (need_jt && draw_error.empty()) {
    try {
      jt = solve(ch.csi, plan, net, opt);
    } catch (const std::exception& e) {
      jt_error = e.what();
    }
  }

  auto finish = [&](SchemeOutcome& o, const StackedPrecoder& f, int active) {
    o.sum_se = prefactor * sinr_true(ch, f, plan, net).sum_se;
    o.objective_bits = se_lower_bound(f, ch.csi, plan, net).sum;
    o.sparsity = baseline_sparsity(f, plan, net.epsilon_sparse);
    o.active_count = active;
    o.ok = true;
  };

  for (const auto& scheme : schemes) {
    SchemeOutcome o;
    o.scheme = scheme;
    try {
      if (!draw_error.empty()) throw std::runtime_error(draw_error);
      if (scheme == "sparse_jt") {
        if (!jt_error.empty()) throw std::runtime_error(jt_error);
        finish(o, jt.f, static_cast<int>(jt.active.size()));
        o.sparsity = jt.sparsity;
        o.has_solver_stats = true;
        o.status = jt.status;
        o.inner_iters = jt.inner_iters;
        o.outer_iters = jt.outer_iters;
        o.kkt_residual = jt.kkt_residual;
        o.second_order = jt.second_order_pass;
      } else if (scheme == "rcc_zf") {
        const BaselineResult b = rcc_zf(ch.csi, plan, net, net.S);
        finish(o, b.f, static_cast<int>(b.active.size()));
      } else if (scheme == "sc_zf") {
        if (!jt_error.empty()) throw std::runtime_error("sparse_jt failed: " + jt_error);
        const BaselineResult b = sc_zf(jt, ch.csi, plan, net);
        finish(o, b.f, static_cast<int>(b.active.size()));
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown scheme " + scheme);
      }
    } catch (const std::exception& e) {
      o.ok = false;
      o.error = e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<RunRow> run_realizations(const ExperimentSpec& spec, int threads, const SolverOptions& opt) {
  spec.validate();
  const QuantizationPlan plan = plan_for(spec, spec.net);
  const int total = spec.n_drops * spec.n_fades;
  std::vector<std::vector<SchemeOutcome>> slots(static_cast<size_t>(total));
  parallel_for(total, threads, [&](int idx) {
    slots[idx] = evaluate_realization(spec.net, plan, spec.schemes, spec.net.seed, idx / spec.n_fades,
                                      idx % spec.n_fades, opt);
  });
  std::vector<RunRow> rows;
  for (int idx = 0; idx < total; ++idx) {
    for (auto& o : slots[idx]) rows.push_back(RunRow{idx / spec.n_fades, idx % spec.n_fades, std::move(o)});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const RunRow& a, const RunRow& b) {
    if (a.drop != b.drop) return a.drop < b.drop;
    if (a.fade != b.fade) return a.fade < b.fade;
    return scheme_rank(a.outcome.scheme) < scheme_rank(b.outcome.scheme);
  });
  return rows;
}

std::vector<SweepRow> run_sweep(const ExperimentSpec& spec, int threads, const SolverOptions& opt) {
  spec.validate();
  std::vector<double> values = spec.sweep_values;
  if (values.empty()) {
    values.push_back(spec.axis == SweepAxis::S ? spec.net.S : spec.net.C_bits_per_use);
  }
  const int per_value = spec.n_drops * spec.n_fades;
  const int total = static_cast<int>(values.size()) * per_value;

  std::vector<NetworkConfig> nets;
  std::vector<QuantizationPlan> plans;
  for (double v : values) {
    NetworkConfig net = spec.net;
    if (spec.axis == SweepAxis::S) {
      net.S = static_cast<int>(v);
    } else {
      net.C_bits_per_use = v;
    }
    nets.push_back(net);
    // On the C axis the plan follows the capacity; an override would pin it.
    plans.push_back(spec.axis == SweepAxis::C ? make_plan(net) : plan_for(spec, net));
  }

  std::vector<std::vector<SchemeOutcome>> slots(static_cast<size_t>(total));
  parallel_for(total, threads, [&](int idx) {
    const int vi = idx / per_value;
    const int r = idx % per_value;
    slots[idx] = evaluate_realization(nets[vi], plans[vi], spec.schemes, spec.net.seed, r / spec.n_fades,
                                      r % spec.n_fades, opt);
  });

  std::vector<SweepRow> rows;
  for (size_t vi = 0; vi < values.size(); ++vi) {
    for (size_t si = 0; si < spec.schemes.size(); ++si) {
      SweepRow row;
      row.axis = spec.axis;
      row.value = values[vi];
      row.scheme = spec.schemes[si];
      std::vector<double> active;
      for (int r = 0; r < per_value; ++r) {
        const SchemeOutcome& o = slots[vi * per_value + r][si];
        if (o.ok) {
          row.samples.push_back(o.sum_se);
          active.push_back(o.active_count);
        }
      }
      row.n_ok = static_cast<int>(row.samples.size());
      row.n_failed = per_value - row.n_ok;
      row.mean_sum_se = mean_of(row.samples);
      row.stderr_sum_se = std_error_of(row.samples);
      row.mean_active_count = mean_of(active);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_plan_csv(std::ostream& os, const NetworkConfig& net, const std::vector<double>& capacities) {
  os << "C_bits_per_use,U,B,B_bar,rate_csi,rate_data\n";
  for (double C : capacities) {
    int B_bar = 0;
    try {
      B_bar = plan_data_bits(C, net.N);
    } catch (const Error&) {
      B_bar = 0;
    }
    for (int U = 1; U <= net.K; ++U) {
      os << format_number(C) << ',' << U << ',';
      try {
        if (B_bar == 0) throw Error(ErrorCode::CapacityTooSmall, "no data bits");
        const int B = plan_csi_bits(C, U, net.N);
        const auto [rc, rd] = fronthaul_rates(U, net.N, B, B_bar);
        os << B << ',' << B_bar << ',' << format_number(rc) << ',' << format_number(rd) << '\n';
      } catch (const Error& e) {
        if (e.code() != ErrorCode::CapacityTooSmall) throw;
        os << "infeasible," << (B_bar > 0 ? std::to_string(B_bar) : std::string("infeasible")) << ",,\n";
      }
    }
  }
}

void write_run_csv(std::ostream& os, const ExperimentSpec& spec, const std::vector<RunRow>& rows) {
  os << "seed,drop,fade,scheme,S,objective_bits,sum_se_true,sparsity,active_count,inner_iters,"
        "outer_iters,kkt_residual,second_order_pass\n";
  for (const auto& r : rows) {
    const SchemeOutcome& o = r.outcome;
    if (!o.ok) continue;
    os << spec.net.seed << ',' << r.drop << ',' << r.fade << ',' << csv_quote(o.scheme) << ',' << spec.net.S
       << ',' << format_number(o.objective_bits) << ',' << format_number(o.sum_se) << ','
       << format_number(o.sparsity) << ',' << o.active_count << ',';
    if (o.has_solver_stats) {
      os << o.inner_iters << ',' << o.outer_iters << ',' << format_number(o.kkt_residual) << ','
         << to_string(o.second_order);
    } else {
      os << ",,," << to_string(CheckState::NotChecked);
    }
    os << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "axis,value,scheme,n_ok,n_failed,mean_sum_se,stderr_sum_se,mean_active_count\n";
  for (const auto& r : rows) {
    os << (r.axis == SweepAxis::S ? "S" : "C") << ',' << format_number(r.value) << ',' << csv_quote(r.scheme)
       << ',' << r.n_ok << ',' << r.n_failed << ',' << format_number(r.mean_sum_se) << ','
       << format_number(r.stderr_sum_se) << ',' << format_number(r.mean_active_count) << '\n';
  }
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("SPARSEJT_THREADS")) {
    int v = 0;
    const std::string s(env);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec == std::errc() && r.ptr == s.data() + s.size() && v > 0) return v;
    config_error("SPARSEJT_THREADS must be a positive integer");
  }
  return 1;
}

}  // namespace sparsejt
