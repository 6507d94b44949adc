#include "cli.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "phasemix/asymptotics.hpp"
#include "phasemix/error.hpp"
#include "phasemix/grid.hpp"
#include "phasemix/io.hpp"

namespace phasemix::cli {

namespace {

using Row = std::vector<double>;

struct Table {
  std::vector<std::string> columns;
  std::vector<Row> rows;
};

std::string_view command_name(Command c) {
  switch (c) {
    case Command::Tail: return "tail";
    case Command::Pdf: return "pdf";
    case Command::Moments: return "moments";
    case Command::Sample: return "sample";
    case Command::Asymptote: return "asymptote";
    case Command::Mda: return "mda";
    case Command::Compare: return "compare";
    case Command::SeriesBounds: return "series-bounds";
  }
  return "tail";
}

Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

unsigned worker_count(const RunConfig& c, std::size_t jobs) {
  unsigned n = c.threads;
  if (n == 0) {
    if (const char* env = std::getenv("PHASEMIX_THREADS"); env && *env) {
      unsigned v = 0;
      const char* end = env + std::char_traits<char>::length(env);
      const auto [p, ec] = std::from_chars(env, end, v);
      if (ec != std::errc() || p != end || v == 0) {
        throw Error(ErrorCode::InvalidArgument, std::string("PHASEMIX_THREADS must be a positive integer, got ") + env);
      }
      n = v;
    } else {
      n = std::max(1u, std::thread::hardware_concurrency());
    }
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Evaluates f over xs on a worker pool; rows come back in grid order, and the error of the
// smallest failing x is the one rethrown.
template <typename F>
std::vector<Row> parallel_rows(const std::vector<double>& xs, unsigned workers, F f) {
  std::vector<Row> out(xs.size());
  std::vector<std::exception_ptr> errors(xs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < xs.size();) {
      try {
        out[i] = f(xs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<double> points(const RunConfig& c) {
  if (c.x) {
    if (!std::isfinite(*c.x) || *c.x < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "--x must be finite and >= 0, got " + format_double(*c.x));
    }
    return {*c.x};
  }
  const GridSpec g = c.grid.value_or(GridSpec{});
  return geometric_grid(g.lo, g.hi, g.per_decade);
}

MixtureModel load(const RunConfig& c) {
  MixtureModel m = load_mixture(c.model_path);
  if (!c.quad_rel_tol && !c.series_tol) return m;
  MixturePolicy p = m.policy();
  if (c.quad_rel_tol) p.quad_rel_tol = *c.quad_rel_tol;
  if (c.series_tol) p.series_tol = *c.series_tol;
  return MixtureModel(m.phase_type(), m.scaler(), p);
}

AsymptoteForm asymptote_for(const MixtureModel& m, double calibration_x) {
  auto f = closed_form_asymptote(m, calibration_x);
  if (!f) {
    throw Error(ErrorCode::InvalidArgument, "the " + m.scaler().name() + " scaler has no closed-form asymptote");
  }
  return *f;
}

void write_table(const RunConfig& c, const Table& t, std::ostream& out) {
  if (c.format == Format::Json) {
    Json rows = Json::array();
    for (const auto& r : t.rows) {
      Json jr = Json::array();
      for (double v : r) jr.push_back(num(v));
      rows.push_back(std::move(jr));
    }
    const Json j = {{"command", std::string(command_name(c.command))}, {"columns", t.columns}, {"rows", rows}};
    out << j.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_double(r[i]);
    out << '\n';
  }
}

void write_pairs(const std::vector<std::pair<std::string, std::string>>& kv, std::ostream& out) {
  out << "key,value\n";
  for (const auto& [k, v] : kv) out << k << ',' << v << '\n';
}

void summarize(const MdaReport& r, std::ostream& out) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("tail_class", r.tail_class == TailClass::Heavy ? "heavy" : "light");
  kv.emplace_back("mda", std::string(to_string(r.mda.kind)));
  if (r.mda.kind == DomainKind::Frechet) kv.emplace_back("alpha", format_double(r.mda.alpha));
  kv.emplace_back("route", r.route);
  if (r.asymptote) {
    kv.emplace_back("asymptote", std::string(to_string(r.asymptote->kind)));
    for (const auto& k : r.asymptote->constants) kv.emplace_back("asymptote." + k.name, format_double(k.value));
  }
  if (r.asymptote_trace) {
    kv.emplace_back("asymptote_ratio", std::string(to_string(r.asymptote_trace->trend)));
    kv.emplace_back("asymptote_ratio_limit", format_double(r.asymptote_trace->limit_estimate));
  }
  if (r.scaler_trace) kv.emplace_back("scaler_ratio", std::string(to_string(r.scaler_trace->trend)));
  for (const auto& h : r.heavy_traces) {
    kv.emplace_back("exp_theta_x_tail[" + format_double(h.theta) + "]",
                    h.increasing_last_decade ? "increasing" : h.decreasing_last_decade ? "decreasing" : "mixed");
  }
  if (r.gumbel) {
    kv.emplace_back("von_mises", std::string(to_string(r.gumbel->verdict)));
    kv.emplace_back("von_mises_gap", format_double(r.gumbel->final_gap));
  }
  kv.emplace_back("subexponential", std::string(to_string(r.subexponential.verdict)));
  for (const auto& e : r.subexponential.per_t) {
    kv.emplace_back("subexp_estimate[" + format_double(e.t) + "]", format_double(e.estimate));
  }
  for (const auto& n : r.norming) {
    kv.emplace_back("c_n[" + format_double(n.n) + "]", format_double(n.c_n));
    if (n.display_c_n) kv.emplace_back("c_n_display[" + format_double(n.n) + "]", format_double(*n.display_c_n));
  }
  for (std::size_t i = 0; i < r.notes.size(); ++i) kv.emplace_back("note[" + std::to_string(i) + "]", '"' + r.notes[i] + '"');
  write_pairs(kv, out);
}

void execute(const RunConfig& c, std::ostream& out) {
  const MixtureModel m = load(c);
  switch (c.command) {
    case Command::Tail:
    case Command::Pdf: {
      const bool tail = c.command == Command::Tail;
      const auto xs = points(c);
      const auto rows = parallel_rows(xs, worker_count(c, xs.size()), [&](double x) {
        return Row{x, tail ? mixture_tail(m, x) : mixture_density(m, x)};
      });
      write_table(c, {{"x", tail ? "tail" : "density"}, rows}, out);
      return;
    }
    case Command::Moments: {
      if (c.order < 1) throw Error(ErrorCode::InvalidArgument, "--order must be >= 1");
      Table t{{"order", "moment"}, {}};
      for (int n = 1; n <= c.order; ++n) t.rows.push_back({static_cast<double>(n), mixture_moment(m, n)});
      write_table(c, t, out);
      return;
    }
    case Command::Sample: {
      Table t{{"x"}, {}};
      for (double v : mixture_sample(m, c.seed, c.count)) t.rows.push_back({v});
      write_table(c, t, out);
      return;
    }
    case Command::Asymptote: {
      const auto xs = points(c);
      const AsymptoteForm f = asymptote_for(m, xs.back());
      if (c.format == Format::Json) {
        out << to_json(f).dump(2) << '\n';
        return;
      }
      std::vector<std::pair<std::string, std::string>> kv{{"kind", std::string(to_string(f.kind))}};
      for (const auto& k : f.constants) kv.emplace_back(k.name, format_double(k.value));
      kv.emplace_back("calibrated", f.calibrated ? "true" : "false");
      if (f.calibrated) kv.emplace_back("calibration_x", format_double(f.calibration_x));
      write_pairs(kv, out);
      return;
    }
    case Command::Mda: {
      MdaOptions opt;
      if (c.x) throw Error(ErrorCode::InvalidArgument, "mda needs a grid, not a single --x");
      if (c.grid) opt.x_grid = geometric_grid(c.grid->lo, c.grid->hi, c.grid->per_decade);
      opt.thetas = c.theta;
      const MdaReport r = mda_report(m, opt);
      if (c.format == Format::Json) {
        out << to_json(r).dump(2) << '\n';
      } else {
        summarize(r, out);
      }
      return;
    }
    case Command::Compare: {
      const auto xs = points(c);
      const AsymptoteForm f = asymptote_for(m, xs.back());
      const auto rows = parallel_rows(xs, worker_count(c, xs.size()), [&](double x) {
        const double v = mixture_tail(m, x);
        const double a = f.value(x);
        const double ratio = a > 0.0 ? v / a : std::exp(mixture_log_tail(m, x) - f.log_value(x));
        return Row{x, v, a, ratio};
      });
      write_table(c, {{"x", "numeric", "asymptote", "ratio"}, rows}, out);
      return;
    }
    case Command::SeriesBounds: {
      const auto xs = points(c);
      const auto rows = parallel_rows(xs, worker_count(c, xs.size()), [&](double x) {
        const SeriesBounds b = mixture_series_bounds(m, x);
        return Row{x, b.lower, b.integral_value, b.upper, b.peak_value, b.peak_location};
      });
      write_table(c, {{"x", "lower", "integral", "upper", "peak", "peak_location"}, rows}, out);
      return;
    }
  }
}

}  // namespace

GridSpec parse_grid(const std::string& spec) {
  auto bad = [&] {
    return Error(ErrorCode::InvalidArgument, "--grid expects LO:HI:PPD with 0 < LO < HI and PPD >= 1, got \"" + spec + "\"");
  };
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string::npos) throw bad();
  auto parse = [&](std::size_t a, std::size_t b, auto& v) {
    const char* first = spec.data() + a;
    const char* last = spec.data() + b;
    const auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) throw bad();
  };
  GridSpec g;
  parse(0, c1, g.lo);
  parse(c1 + 1, c2, g.hi);
  parse(c2 + 1, spec.size(), g.per_decade);
  if (!(g.lo > 0.0) || !(g.hi > g.lo) || !std::isfinite(g.hi) || g.per_decade < 1) throw bad();
  return g;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    execute(config, out);
    return kExitOk;
  } catch (const Error& e) {
    err << "phasemix: " << e.what() << '\n';
    return is_validation_error(e.code()) ? kExitValidation : kExitNumeric;
  } catch (const std::exception& e) {
    err << "phasemix: " << e.what() << '\n';
    return kExitNumeric;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phase-type scale mixtures: tails, densities, sampling and extreme-value diagnostics."};
  app.name("phasemix");
  RunConfig c;
  std::string command;
  std::string grid;
  std::string format = "csv";
  double x = 0.0;
  app.add_option("command", command, "tail | pdf | moments | sample | asymptote | mda | compare | series-bounds")
      ->required()
      ->check(CLI::IsMember({"tail", "pdf", "moments", "sample", "asymptote", "mda", "compare", "series-bounds"}));
  app.add_option("-m,--model", c.model_path, "model JSON file")->required();
  auto* xo = app.add_option("--x", x, "single evaluation point");
  auto* go = app.add_option("--grid", grid, "LO:HI:PPD, log-spaced (default 0.1:1000:8)");
  xo->excludes(go);
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", c.seed, "sampling seed");
  app.add_option("--count", c.count, "number of draws")->check(CLI::PositiveNumber);
  app.add_option("--order", c.order, "highest moment order")->check(CLI::PositiveNumber);
  app.add_option("--theta", c.theta, "comma-separated theta values for the mda heavy-tail traces")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  auto* qt = app.add_option("--quad-tol", "quadrature relative tolerance");
  auto* st = app.add_option("--series-tol", "series truncation tolerance");
  app.add_option("--threads", c.threads, "worker threads (default PHASEMIX_THREADS or all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "phasemix: " << e.what() << '\n';
    return kExitValidation;
  }

  static constexpr std::pair<std::string_view, Command> kCommands[] = {
      {"tail", Command::Tail},       {"pdf", Command::Pdf},         {"moments", Command::Moments},
      {"sample", Command::Sample},   {"asymptote", Command::Asymptote}, {"mda", Command::Mda},
      {"compare", Command::Compare}, {"series-bounds", Command::SeriesBounds}};
  for (const auto& [name, cmd] : kCommands) {
    if (command == name) c.command = cmd;
  }
  c.format = format == "json" ? Format::Json : Format::Csv;
  if (*xo) c.x = x;
  if (*qt) c.quad_rel_tol = qt->as<double>();
  if (*st) c.series_tol = st->as<double>();
  if (*go) {
    try {
      c.grid = parse_grid(grid);
    } catch (const Error& e) {
      err << "phasemix: " << e.what() << '\n';
      return kExitValidation;
    }
  }
  return run(c, out, err);
}

}  // namespace phasemix::cli
