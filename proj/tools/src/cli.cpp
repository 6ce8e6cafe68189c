#include "swnc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace swnc::cli {

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double to_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v))
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::uint64_t to_uint(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("not a non-negative integer: '" + s + "'");
  return std::stoull(s);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& raw : split(text, ',')) {
    const std::string item = trim(raw);
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(to_real(item));
      continue;
    }
    if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:step: " + item);
    const double a = to_real(trim(parts[0])), b = to_real(trim(parts[1])),
                 step = to_real(trim(parts[2]));
    if (step <= 0 || b < a) throw std::invalid_argument("range needs step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    // Round away the accumulated binary error so 0.05:0.30:0.05 prints cleanly.
    for (std::size_t i = 0; i < count; ++i)
      out.push_back(std::round((a + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return out;
}

std::vector<std::uint64_t> parse_int_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  for (const auto& raw : split(text, ',')) {
    const std::string item = trim(raw);
    const auto colon = split(item, ':');
    const auto dash = split(item, '-');
    std::uint64_t lo = 0, hi = 0, step = 1;
    if (colon.size() == 3) {
      lo = to_uint(trim(colon[0]));
      hi = to_uint(trim(colon[1]));
      step = to_uint(trim(colon[2]));
    } else if (colon.size() == 1 && dash.size() == 2) {
      lo = to_uint(trim(dash[0]));
      hi = to_uint(trim(dash[1]));
    } else if (colon.size() == 1 && dash.size() == 1) {
      lo = hi = to_uint(item);
    } else {
      throw std::invalid_argument("bad integer list item: '" + item + "'");
    }
    if (step == 0 || hi < lo) throw std::invalid_argument("bad integer range: '" + item + "'");
    for (std::uint64_t v = lo; v <= hi; v += step) out.push_back(v);
  }
  return out;
}

std::vector<Scenario> parse_scenarios(std::string_view text) {
  if (trim(text) == "all")
    return {Scenario::kSrArq, Scenario::kSwncEndToEnd, Scenario::kSwncRecoder};
  std::vector<Scenario> out;
  for (const auto& raw : split(text, ',')) {
    const auto s = parse_scenario(trim(raw));
    if (!s) throw std::invalid_argument("unknown scenario '" + trim(raw) + "' (srarq, e2e, recoder, all)");
    out.push_back(*s);
  }
  return out;
}

std::vector<ScenarioConfig> expand(const SweepConfig& sweep) {
  std::vector<ScenarioConfig> out;
  for (Scenario sc : sweep.scenarios)
    for (double e1 : sweep.eps1)
      for (double e2 : sweep.eps2)
        for (Slot rtt : sweep.rtt)
          for (std::uint64_t seed : sweep.seeds) {
            ScenarioConfig c = sweep.base;
            c.scenario = sc;
            c.eps1 = e1;
            c.eps2 = e2;
            c.rtt = rtt;
            c.seed = seed;
            out.push_back(std::move(c));
          }
  return out;
}

std::string csv_header() {
  return "scenario,eps1,eps2,rtt,seed,completed,completion_slots,total_transmissions,tx_link1,"
         "tx_link2,success_ratio,theoretical_bound";
}

std::string csv_row(const ScenarioConfig& c, const RunResult& r) {
  const RunMetrics& m = r.metrics;
  std::ostringstream row;
  row << to_string(c.scenario) << ',' << fixed(c.eps1, 4) << ',' << fixed(c.eps2, 4) << ','
      << c.rtt << ',' << c.seed << ',' << (m.completed ? 1 : 0) << ',' << m.completion_slots << ','
      << m.total_transmissions << ',' << m.tx_link1 << ',' << m.tx_link2 << ','
      << fixed(m.success_ratio, 6) << ','
      << fixed(theoretical_success_ratio(c.scenario, c.eps1, c.eps2), 6);
  return row.str();
}

std::vector<RunResult> run_sweep(const SweepConfig& sweep, std::ostream& out) {
  const auto points = expand(sweep);
  std::vector<RunResult> results(points.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(sweep.jobs, static_cast<unsigned>(points.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) results[i] = run_scenario(points[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mu;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
          try {
            results[i] = run_scenario(points[i]);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  out << csv_header() << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) out << csv_row(points[i], results[i]) << '\n';
  return results;
}

void write_summary(const std::vector<ScenarioConfig>& points, const std::vector<RunResult>& results,
                   std::ostream& out) {
  struct Acc {
    std::size_t runs = 0, completed = 0;
    double slots = 0, tx = 0, ratio = 0;
  };
  std::map<Scenario, Acc> acc;
  for (std::size_t i = 0; i < points.size(); ++i) {
    Acc& a = acc[points[i].scenario];
    const RunMetrics& m = results[i].metrics;
    ++a.runs;
    a.completed += m.completed ? 1 : 0;
    a.slots += static_cast<double>(m.completion_slots);
    a.tx += static_cast<double>(m.total_transmissions);
    a.ratio += m.success_ratio;
  }
  out << "scenario  runs  completed  mean_slots  mean_tx  mean_ratio\n";
  for (const auto& [sc, a] : acc) {
    const double n = static_cast<double>(a.runs);
    char line[160];
    std::snprintf(line, sizeof line, "%-8s %5zu %10zu %11.1f %8.1f %11.4f\n", to_string(sc).c_str(),
                  a.runs, a.completed, a.slots / n, a.tx / n, a.ratio / n);
    out << line;
  }
}

std::vector<Finding> validate_report(const SweepConfig& sweep) {
  std::vector<Finding> out;
  auto warn = [&](std::string m) { out.push_back({Finding::Level::kWarning, std::move(m)}); };
  auto error = [&](std::string m) { out.push_back({Finding::Level::kError, std::move(m)}); };
  const ScenarioConfig& b = sweep.base;

  if (b.max_window < 1 || b.max_window > 255)
    error("max_window " + std::to_string(b.max_window) +
          " exceeds the 1-byte window/coefficient header fields (1..255)");
  if (b.packets < 1 || b.packets > 0xFFFF)
    error("packets " + std::to_string(b.packets) + " exceeds the 16-bit index fields (1..65535)");
  if (b.payload_bytes < 1) error("payload_bytes must be positive");
  if (b.slot_cap < 1) error("slot_cap must be positive");
  if (b.gamma < 0) warn("gamma " + fixed(b.gamma, 4) + " is negative: code rates exceed 1 - loss");
  if (sweep.scenarios.empty() || sweep.eps1.empty() || sweep.eps2.empty() || sweep.rtt.empty() ||
      sweep.seeds.empty())
    error("every sweep axis needs at least one value");
  for (Slot rtt : sweep.rtt)
    if (rtt <= b.forward_delay)
      error("rtt " + std::to_string(rtt) + " leaves no slot for feedback (must exceed " +
            std::to_string(b.forward_delay) + ")");

  auto check_rate = [&](const std::optional<CodeRate>& r, const char* name) {
    if (r && (r->k < 1 || r->k > r->n || r->n > 255))
      error(std::string(name) + " rate " + r->to_string() + " needs 1 <= k <= n <= 255");
  };
  check_rate(b.rate_source, "source");
  check_rate(b.rate_recoder, "recoder");

  for (double e : sweep.eps1)
    if (!(e >= 0 && e < 1)) error("eps1 " + fixed(e, 4) + " outside [0, 1)");
  for (double e : sweep.eps2)
    if (!(e >= 0 && e < 1)) error("eps2 " + fixed(e, 4) + " outside [0, 1)");

  for (Scenario sc : sweep.scenarios) {
    if (sc == Scenario::kSrArq) continue;
    for (double e1 : sweep.eps1)
      for (double e2 : sweep.eps2) {
        ScenarioConfig c = b;
        c.scenario = sc;
        c.eps1 = e1;
        c.eps2 = e2;
        const double src_loss = sc == Scenario::kSwncRecoder ? e1 : combined_loss(e1, e2);
        const CodeRate src = effective_source_rate(c);
        if (src.value() > 1.0 - src_loss + 1e-12)
          warn(to_string(sc) + ": source rate " + src.to_string() + " exceeds 1 - loss = " +
               fixed(1.0 - src_loss, 4) + " (negative gamma)");
        if (sc == Scenario::kSwncRecoder) {
          const CodeRate rec = effective_recoder_rate(c);
          if (rec.value() > 1.0 - e2 + 1e-12)
            warn("recoder: rate " + rec.to_string() + " exceeds 1 - eps2 = " + fixed(1.0 - e2, 4) +
                 " (negative gamma)");
        }
      }
  }
  // Errors first; repeated findings from different sweep points appear once.
  std::stable_sort(out.begin(), out.end(),
                   [](const Finding& x, const Finding& y) { return x.level > y.level; });
  std::vector<Finding> unique;
  for (auto& f : out)
    if (std::none_of(unique.begin(), unique.end(),
                     [&](const Finding& u) { return u.level == f.level && u.message == f.message; }))
      unique.push_back(std::move(f));
  return unique;
}

void write_golden_trace(std::ostream& out) {
  const ScenarioConfig cfg = golden_trace_config();
  const RunResult r = run_scenario(cfg);
  out << "# two-hop example: " << cfg.packets << " packets, source rate "
      << r.source_rate.to_string() << ", recoder rate " << r.recoder_rate.to_string()
      << ", forward delay " << cfg.forward_delay << ", feedback delay " << feedback_delay(cfg)
      << "\n# link1 loses sends at slots";
  for (Slot s : *cfg.losses_link1) out << ' ' << s;
  out << "; link2 loses sends at slots";
  for (Slot s : *cfg.losses_link2) out << ' ' << s;
  out << '\n';
  for (const auto& e : r.trace) out << to_string(e) << '\n';
}

namespace {

struct Options {
  std::string scenario = "all";
  std::string eps1 = "0.05";
  std::string eps2 = "0.15";
  std::string rtt = "20";
  std::string seeds = "1";
  std::uint32_t packets = 100;
  std::size_t payload_bytes = 100;
  std::string rate_src;
  std::string rate_recoder;
  double gamma = 0.01;
  Slot slot_cap = 500;
  std::size_t max_window = 255;
  std::string overflow = "hold";
  std::string loss_trace;
  std::string out;
  unsigned jobs = 1;
  bool golden = false;
  bool summary = false;
};

SweepConfig build_sweep(const Options& o) {
  SweepConfig s;
  s.scenarios = parse_scenarios(o.scenario);
  s.eps1 = parse_real_list(o.eps1);
  s.eps2 = parse_real_list(o.eps2);
  s.rtt = parse_int_list(o.rtt);
  s.seeds = parse_int_list(o.seeds);
  s.jobs = o.jobs;
  ScenarioConfig& b = s.base;
  b.packets = o.packets;
  b.payload_bytes = o.payload_bytes;
  if (!o.rate_src.empty()) b.rate_source = CodeRate::parse(o.rate_src);
  if (!o.rate_recoder.empty()) b.rate_recoder = CodeRate::parse(o.rate_recoder);
  b.gamma = o.gamma;
  b.slot_cap = o.slot_cap;
  b.max_window = o.max_window;
  if (o.overflow == "hold") {
    b.overflow = OverflowPolicy::kHoldAndRepair;
  } else if (o.overflow == "drop") {
    b.overflow = OverflowPolicy::kDropOldest;
  } else {
    throw std::invalid_argument("overflow must be hold or drop");
  }
  if (!o.loss_trace.empty()) {
    const LossTrace t = load_loss_trace(o.loss_trace);
    if (t.has_link1) b.losses_link1 = t.link1;
    if (t.has_link2) b.losses_link2 = t.link2;
  }
  return s;
}

void report(const std::vector<Finding>& findings, std::ostream& out) {
  for (const auto& f : findings)
    out << (f.level == Finding::Level::kError ? "error: " : "warning: ") << f.message << '\n';
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-hop sliding-window network coding simulator"};
  app.set_config("--config", "", "Read `key = value` settings; command-line flags take precedence");
  app.fallthrough();
  app.require_subcommand(0, 1);

  Options o;
  // Comma lists arrive split when read from a config file; join them back.
  const auto list_option = [&](const char* name, std::string& target, const char* help) {
    app.add_option(name, target, help)
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::Join)
        ->capture_default_str();
  };
  list_option("--scenario", o.scenario, "all, or a comma list of srarq, e2e, recoder");
  list_option("--eps1", o.eps1, "Loss on link1: value, list or start:stop:step");
  list_option("--eps2", o.eps2, "Loss on link2: value, list or start:stop:step");
  list_option("--rtt", o.rtt, "Per-link round trip in slots: value, list or range");
  app.add_option("--packets", o.packets, "Source packets per run")->capture_default_str();
  app.add_option("--payload-bytes", o.payload_bytes, "Bytes per packet")->capture_default_str();
  app.add_option("--rate-src", o.rate_src, "Source code rate k/n (default: derived)");
  app.add_option("--rate-recoder", o.rate_recoder, "Recoder code rate k/n (default: derived)");
  app.add_option("--gamma", o.gamma, "Rate margin below 1 - loss when deriving rates")
      ->capture_default_str();
  list_option("--seeds", o.seeds, "Seeds: list or lo-hi range");
  app.add_option("--slot-cap", o.slot_cap, "Give up after this many slots")->capture_default_str();
  app.add_option("--max-window", o.max_window, "Coding window / coefficient count")
      ->capture_default_str();
  app.add_option("--overflow", o.overflow, "Full source window: hold or drop")->capture_default_str();
  app.add_option("--loss-trace", o.loss_trace, "File of scripted loss slots per link");
  app.add_option("--out", o.out, "Write output here instead of stdout");
  app.add_option("--jobs", o.jobs, "Parallel runs")->capture_default_str();
  app.add_flag("--golden-trace", o.golden, "Replay the worked two-hop example slot by slot");
  app.add_flag("--summary", o.summary, "Print per-scenario means to stderr after a run");

  auto* run_cmd = app.add_subcommand("run", "Run the sweep and write CSV (default)");
  auto* validate_cmd = app.add_subcommand("validate", "Report configuration problems");
  (void)run_cmd;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    std::ofstream file;
    std::ostream* sink = &out;
    if (!o.out.empty()) {
      file.open(o.out);
      if (!file) throw std::invalid_argument("cannot write " + o.out);
      sink = &file;
    }

    if (o.golden) {
      write_golden_trace(*sink);
      return 0;
    }

    const SweepConfig sweep = build_sweep(o);
    const auto findings = validate_report(sweep);
    if (validate_cmd->parsed()) {
      report(findings, *sink);
      return 0;
    }

    report(findings, err);
    if (std::any_of(findings.begin(), findings.end(),
                    [](const Finding& f) { return f.level == Finding::Level::kError; }))
      return 2;
    const auto results = run_sweep(sweep, *sink);
    if (o.summary) write_summary(expand(sweep), results, err);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace swnc::cli
