// Command-line front end: single realizations, disorder ensembles, the
// analytic cross-check and configuration validation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qwalk/analytic.hpp"
#include "qwalk/io.hpp"
#include "qwalk/qwalk.hpp"

namespace {

int exit_code(qwalk::ErrorCategory c) {
  switch (c) {
    case qwalk::ErrorCategory::config: return 2;
    case qwalk::ErrorCategory::domain: return 3;
    case qwalk::ErrorCategory::contract: return 4;
    case qwalk::ErrorCategory::window_overflow: return 5;
    case qwalk::ErrorCategory::numeric: return 6;
    case qwalk::ErrorCategory::io: return 7;
  }
  return 1;
}

// Command-line values that override keys of the configuration file.
struct Overrides {
  std::string config_path;
  std::string geometry;
  std::size_t sites = 0;
  std::size_t steps = 0;
  std::vector<double> disorder;
  std::size_t realizations = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> snapshots;
  std::size_t stride = 0;
  std::vector<std::string> observables;
  std::string format;
  std::string output;
  std::size_t workers = 0;
  double smoothing = -1.0;
  std::size_t sigma_min_time = 0;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* smoothing_opt = nullptr;
  CLI::Option* sigma_min_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "JSON configuration file");
    app->add_option("--geometry", geometry, "line, ring or segment");
    app->add_option("--sites", sites, "number of lattice sites (odd)");
    app->add_option("-T,--steps", steps, "number of time steps");
    app->add_option("-W,--disorder", disorder, "disorder strengths in [0,1]");
    app->add_option("-N,--realizations", realizations, "disorder realizations per W");
    seed_opt = app->add_option("--seed", seed, "master seed");
    app->add_option("--snapshots", snapshots, "explicit snapshot times");
    app->add_option("--stride", stride, "snapshot every k steps");
    app->add_option("--observables", observables,
                    "occupation p0 fidelity mixing msd sigma ee negativity");
    app->add_option("--format", format, "csv or json");
    app->add_option("-o,--output", output, "output file (default: stdout)");
    app->add_option("-j,--workers", workers, "worker threads (default: QWALK_WORKERS or all cores)");
    smoothing_opt = app->add_option("--smoothing", smoothing, "spline penalty (default: GCV)");
    sigma_min_opt = app->add_option("--sigma-min-time", sigma_min_time, "first time reported for sigma");
  }

  qwalk::ExperimentConfig resolve(std::string& out_path) const {
    qwalk::ExperimentConfig c;
    if (!config_path.empty()) out_path = qwalk::apply_config(qwalk::load_json_file(config_path), c);
    if (!geometry.empty()) c.geometry = qwalk::parse_geometry_kind(geometry);
    if (sites) c.sites = sites;
    if (steps) c.steps = steps;
    if (!disorder.empty()) c.disorder = disorder;
    if (realizations) c.realizations = realizations;
    if (seed_opt->count()) c.master_seed = seed;
    if (!snapshots.empty()) c.snapshot_times = snapshots;
    if (stride) c.snapshot_stride = stride;
    if (!observables.empty()) {
      c.observables.clear();
      for (const auto& name : observables) {
        const auto o = qwalk::parse_observable(name);
        if (!o) throw qwalk::ConfigError("unknown observable '" + name + "'");
        c.observables.push_back(*o);
      }
    }
    if (!format.empty()) c.format = qwalk::parse_format(format);
    if (!output.empty()) out_path = output;
    if (workers) c.workers = workers;
    if (smoothing_opt->count()) c.smoothing = smoothing;
    if (sigma_min_opt->count()) c.sigma_min_time = sigma_min_time;
    return c;
  }
};

template <class Writer>
void write_output(const std::string& path, Writer&& writer) {
  if (path.empty() || path == "-") {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw qwalk::IoError("cannot open '" + path + "' for writing");
  writer(out);
  out.flush();
  if (!out) throw qwalk::IoError("write to '" + path + "' failed");
}

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void run_simulate(const Overrides& o, std::size_t realization) {
  std::string out_path;
  qwalk::ExperimentConfig c = o.resolve(out_path);
  if (o.disorder.size() > 1) throw qwalk::ConfigError("simulate takes a single disorder strength");
  const double W = o.disorder.empty() ? 0.0 : o.disorder.front();
  c.disorder = {W};
  c.realizations = std::max<std::size_t>(c.realizations, realization + 1);
  c.observables = {qwalk::Observable::msd};
  qwalk::require_valid(c);

  const qwalk::Geometry g(c.geometry, qwalk::resolved_sites(c));
  const auto field = qwalk::sample_coin_field(
      g, W, qwalk::derive_seed(c.master_seed, 0, static_cast<std::uint32_t>(realization)));
  std::vector<std::size_t> times = c.snapshot_times;
  if (times.empty()) times = {c.steps};
  const auto states = qwalk::evolve(qwalk::initial_state(g), field, c.steps, times);

  write_output(out_path, [&](std::ostream& out) {
    if (c.format == qwalk::OutputFormat::json) {
      nlohmann::json doc{{"geometry", qwalk::to_string(g.kind())},
                         {"sites", g.sites()},
                         {"W", W},
                         {"seed", field.seed()},
                         {"r", field.r()},
                         {"snapshots", nlohmann::json::array()}};
      for (const auto& s : states) {
        nlohmann::json up = nlohmann::json::array(), down = nlohmann::json::array();
        for (std::size_t i = 0; i < g.sites(); ++i) {
          up.push_back({s.up(i).real(), s.up(i).imag()});
          down.push_back({s.down(i).real(), s.down(i).imag()});
        }
        doc["snapshots"].push_back({{"t", s.time()}, {"up", up}, {"down", down}});
      }
      out << doc.dump(1) << '\n';
      return;
    }
    out << "t,x,r,re_up,im_up,re_down,im_down\n";
    for (const auto& s : states)
      for (std::size_t i = 0; i < g.sites(); ++i)
        out << s.time() << ',' << g.position(i) << ',' << full_precision(field.r()[i]) << ','
            << full_precision(s.up(i).real()) << ',' << full_precision(s.up(i).imag()) << ','
            << full_precision(s.down(i).real()) << ',' << full_precision(s.down(i).imag()) << '\n';
  });
}

void run_ensemble(const Overrides& o) {
  std::string out_path;
  const qwalk::ExperimentConfig c = o.resolve(out_path);
  const qwalk::ResultTable table = qwalk::run_experiment(c);
  write_output(out_path, [&](std::ostream& out) {
    if (c.format == qwalk::OutputFormat::json)
      qwalk::write_json(out, table);
    else
      qwalk::write_csv(out, table);
  });
}

void run_oracle(std::vector<std::size_t> times, std::size_t quad_points, bool profile,
                const std::string& out_path) {
  write_output(out_path, [&](std::ostream& out) {
    if (!profile) {
      out << "t,quad_points,max_abs_diff\n";
      for (std::size_t t : times) {
        const std::size_t q = quad_points ? quad_points : qwalk::analytic::default_quad_points(t);
        out << t << ',' << q << ',' << qwalk::format_number(qwalk::analytic::compare_with_engine(t, q))
            << '\n';
      }
      return;
    }
    out << "t,x,p_analytic,p_engine\n";
    for (std::size_t t : times) {
      const std::size_t q = quad_points ? quad_points : qwalk::analytic::default_quad_points(t);
      const auto g = qwalk::Geometry::line(t);
      auto s = qwalk::initial_state(g);
      qwalk::advance(s, qwalk::CoinField::uniform(g), t);
      const auto engine = qwalk::occupation(s);
      const auto exact = qwalk::analytic::analytic_occupation(g, t, qwalk::analytic::symmetric_coin(), q);
      for (std::size_t i = 0; i < g.sites(); ++i)
        out << t << ',' << g.position(i) << ',' << qwalk::format_number(exact.p[i]) << ','
            << qwalk::format_number(engine.p[i]) << '\n';
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coined quantum walks with quenched coin disorder"};
  app.require_subcommand(1);

  Overrides sim_o, ens_o, val_o;

  auto* sim = app.add_subcommand("simulate", "evolve one disorder realization and dump amplitudes");
  sim_o.attach(sim);
  std::size_t realization = 0;
  sim->add_option("-i,--realization", realization, "realization index (seed derivation)");

  auto* ens = app.add_subcommand("ensemble", "run a disorder-ensemble experiment");
  ens_o.attach(ens);

  auto* ora = app.add_subcommand("oracle", "compare the engine with the analytic Hadamard walk");
  std::vector<std::size_t> oracle_times{20, 40, 100};
  std::size_t quad_points = 0;
  bool profile = false;
  std::string oracle_out;
  ora->add_option("--times", oracle_times, "times to compare");
  ora->add_option("--quad-points", quad_points, "trapezoid nodes (default max(16(t+1), 64))");
  ora->add_flag("--profile", profile, "print p_x from both routes instead of the max deviation");
  ora->add_option("-o,--output", oracle_out, "output file (default: stdout)");

  auto* val = app.add_subcommand("validate", "check a configuration and report every violation");
  val_o.attach(val);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*sim) {
      run_simulate(sim_o, realization);
    } else if (*ens) {
      run_ensemble(ens_o);
    } else if (*ora) {
      run_oracle(oracle_times, quad_points, profile, oracle_out);
    } else if (*val) {
      std::string out_path;
      const auto c = val_o.resolve(out_path);
      const auto violations = qwalk::validate(c);
      if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "error[config]: " << v << '\n';
        return exit_code(qwalk::ErrorCategory::config);
      }
      std::cout << "ok\n";
    }
  } catch (const qwalk::Error& e) {
    std::cerr << "error[" << qwalk::to_string(e.category()) << "]: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
