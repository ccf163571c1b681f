#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

#include "coin.hpp"
#include "entanglement.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "observables.hpp"
#include "seed.hpp"
#include "walk.hpp"

namespace qwalk {

enum class Observable { occupation, p0, fidelity, mixing, msd, sigma, ee, negativity };

inline constexpr Observable all_observables[] = {
    Observable::occupation, Observable::p0, Observable::fidelity, Observable::mixing,
    Observable::msd,        Observable::sigma, Observable::ee,   Observable::negativity};

inline const char* to_string(Observable o) {
  switch (o) {
    case Observable::occupation: return "occupation";
    case Observable::p0: return "p0";
    case Observable::fidelity: return "fidelity";
    case Observable::mixing: return "mixing";
    case Observable::msd: return "msd";
    case Observable::sigma: return "sigma";
    case Observable::ee: return "ee";
    case Observable::negativity: return "negativity";
  }
  return "unknown";
}

inline std::optional<Observable> parse_observable(std::string_view s) {
  for (Observable o : all_observables)
    if (s == to_string(o)) return o;
  return std::nullopt;
}

enum class OutputFormat { csv, json };

struct ExperimentConfig {
  GeometryKind geometry = GeometryKind::line;
  std::size_t sites = 0;  // 0: 2T+1 on the line, 61 on ring and segment
  std::size_t steps = 100;
  std::vector<double> disorder{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::size_t realizations = 1000;
  std::uint64_t master_seed = 1;
  std::vector<std::size_t> snapshot_times;  // empty: every snapshot_stride steps
  std::size_t snapshot_stride = 1;
  std::vector<Observable> observables{Observable::p0, Observable::msd};
  OutputFormat format = OutputFormat::csv;
  std::optional<double> smoothing;  // empty: generalised cross-validation
  std::size_t sigma_min_time = 10;
  std::size_t quad_points = 0;  // oracle runs; 0 picks the default
  std::size_t workers = 0;      // 0: QWALK_WORKERS, else hardware concurrency

  bool wants(Observable o) const {
    return std::find(observables.begin(), observables.end(), o) != observables.end();
  }
};

inline std::size_t resolved_sites(const ExperimentConfig& c) {
  if (c.sites != 0) return c.sites;
  return c.geometry == GeometryKind::line ? 2 * c.steps + 1 : 61;
}

inline std::vector<std::size_t> snapshot_schedule(const ExperimentConfig& c) {
  if (!c.snapshot_times.empty()) return c.snapshot_times;
  std::vector<std::size_t> t;
  const std::size_t stride = std::max<std::size_t>(c.snapshot_stride, 1);
  for (std::size_t s = 0; s <= c.steps; s += stride) t.push_back(s);
  if (t.back() != c.steps) t.push_back(c.steps);
  return t;
}

/// All violations of the configuration invariants; empty when valid.
inline std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> v;
  const std::size_t L = resolved_sites(c);
  if (c.realizations < 1) v.push_back("realizations must be >= 1");
  if (c.realizations > 0xffffffffULL) v.push_back("realizations must be < 2^32");
  if (c.steps < 1) v.push_back("steps must be >= 1");
  if (L < 3 || L % 2 == 0) v.push_back("sites must be odd and >= 3, got " + std::to_string(L));
  if (c.geometry == GeometryKind::line && L < 2 * c.steps + 1)
    v.push_back("line window of " + std::to_string(L) + " sites cannot hold " +
                std::to_string(c.steps) + " steps (needs >= " + std::to_string(2 * c.steps + 1) + ")");
  if (c.disorder.empty()) v.push_back("disorder list is empty");
  for (double w : c.disorder)
    if (!(w >= 0.0 && w <= 1.0)) v.push_back("disorder strength " + std::to_string(w) + " outside [0,1]");
  if (c.observables.empty()) v.push_back("no observables selected");
  if (c.snapshot_times.empty() && c.snapshot_stride < 1) v.push_back("snapshot stride must be >= 1");
  for (std::size_t k = 0; k < c.snapshot_times.size(); ++k) {
    if (c.snapshot_times[k] > c.steps)
      v.push_back("snapshot time " + std::to_string(c.snapshot_times[k]) + " exceeds steps");
    if (k > 0 && c.snapshot_times[k] <= c.snapshot_times[k - 1])
      v.push_back("snapshot times must be strictly increasing");
  }
  if (c.smoothing && !(*c.smoothing >= 0.0)) v.push_back("smoothing penalty must be >= 0");
  if (c.wants(Observable::sigma)) {
    std::size_t usable = 0;
    for (std::size_t t : snapshot_schedule(c)) usable += t > 0 ? 1 : 0;
    if (usable < 10)
      v.push_back("sigma needs at least 10 snapshot times with t > 0, got " + std::to_string(usable));
  }
  if (v.empty()) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(c.disorder.size() * c.realizations);
    for (std::size_t w = 0; w < c.disorder.size(); ++w)
      for (std::size_t i = 0; i < c.realizations; ++i)
        if (!seen.insert(derive_seed(c.master_seed, static_cast<std::uint32_t>(w),
                                     static_cast<std::uint32_t>(i)))
                 .second)
          v.push_back("seed collision at W index " + std::to_string(w) + ", realization " +
                      std::to_string(i));
  }
  return v;
}

inline void require_valid(const ExperimentConfig& c) {
  const auto v = validate(c);
  if (v.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& s : v) msg += "\n  - " + s;
  throw ConfigError(msg);
}

struct ResultRow {
  double disorder = 0.0;
  std::size_t time = 0;
  std::string observable;
  double value = 0.0;
  double std_error = 0.0;
  std::size_t realizations = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

using ResultTable = std::vector<ResultRow>;

/// Worker count: explicit value, else QWALK_WORKERS, else hardware concurrency.
inline std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QWALK_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

// Runs body(i) for i in [0, n) on `workers` threads with a static
// contiguous partition. The first exception by index is rethrown.
template <class Body>
void parallel_for(std::size_t n, std::size_t workers, Body&& body) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  std::vector<std::exception_ptr> errors(workers);
  auto run_chunk = [&](std::size_t w) {
    const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
    try {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    run_chunk(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run_chunk, w);
    run_chunk(0);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Welford accumulator; identical samples give exactly zero spread.
struct Moments {
  std::size_t count = 0;
  double avg = 0.0, m2 = 0.0;
  void add(double v) {
    ++count;
    const double d = v - avg;
    avg += d / static_cast<double>(count);
    m2 += d * (v - avg);
  }
  double mean() const { return avg; }
  double std_error() const {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    return std::sqrt(std::max(0.0, m2 / (n - 1.0)) / n);
  }
};

}  // namespace detail

/// Runs the disorder ensemble for every W in the configuration.
///
/// All realizations of one W advance in lockstep between snapshot times,
/// in parallel. Per-realization results are stored by index and reduced
/// sequentially, so the table is identical for every worker count. For
/// W = 0 all realizations coincide; one is simulated and reported with
/// the configured N and zero standard error.
inline ResultTable run_experiment(const ExperimentConfig& config) {
  require_valid(config);
  const Geometry g(config.geometry, resolved_sites(config));
  const std::size_t L = g.sites();
  const auto times = snapshot_schedule(config);
  const std::size_t workers = resolve_workers(config.workers);
  const std::size_t N = config.realizations;

  const bool want_occ = config.wants(Observable::occupation);
  const bool want_p0 = config.wants(Observable::p0);
  const bool want_fid = config.wants(Observable::fidelity);
  const bool want_mix = config.wants(Observable::mixing);
  const bool want_msd = config.wants(Observable::msd);
  const bool want_sigma = config.wants(Observable::sigma);
  const bool want_ee = config.wants(Observable::ee);
  const bool want_neg = config.wants(Observable::negativity);

  ResultTable table;
  for (std::size_t wi = 0; wi < config.disorder.size(); ++wi) {
    const double W = config.disorder[wi];
    const std::size_t M = W == 0.0 ? 1 : N;

    std::vector<CoinField> fields;
    fields.reserve(M);
    for (std::size_t i = 0; i < M; ++i)
      fields.push_back(sample_coin_field(
          g, W, derive_seed(config.master_seed, static_cast<std::uint32_t>(wi), static_cast<std::uint32_t>(i))));
    std::vector<WalkState> states(M, initial_state(g));

    const CoinField clean = CoinField::uniform(g, 0.5);
    WalkState reference = initial_state(g);

    std::vector<double> occ(M * L);
    std::vector<double> fid_i(M), ee_i(M);
    MsdSeries msd_series{{}, {}, W};

    for (std::size_t t : times) {
      if (want_fid) advance(reference, clean, t - reference.time());
      detail::parallel_for(M, workers, [&](std::size_t i) {
        try {
          advance(states[i], fields[i], t - states[i].time());
        } catch (const WindowOverflow& e) {
          throw WindowOverflow(std::string(e.what()) + " [W=" + std::to_string(W) +
                               ", realization=" + std::to_string(i) + ", t=" + std::to_string(t) + "]");
        }
        for (std::size_t s = 0; s < L; ++s)
          occ[i * L + s] = std::norm(states[i].up(s)) + std::norm(states[i].down(s));
        if (want_fid) fid_i[i] = overlap_squared(states[i], reference);
        if (want_ee) ee_i[i] = entanglement_entropy(reduced_coin_density(states[i]));
      });

      auto emit_row = [&](std::string name, double value, double err) {
        if (!std::isfinite(value) || !std::isfinite(err))
          throw NumericError("non-finite " + name + " at W=" + std::to_string(W) + ", t=" + std::to_string(t));
        table.push_back({W, t, std::move(name), value, err, N});
      };

      // Ensemble occupation and per-realization scalar moments, in index order.
      ProbDist mean{g, t, std::vector<double>(L, 0.0)};
      std::vector<detail::Moments> site_m(want_occ ? L : 0);
      detail::Moments p0_m, msd_m, fid_m, ee_m;
      for (std::size_t i = 0; i < M; ++i) {
        const double* p = &occ[i * L];
        double m2 = 0.0;
        for (std::size_t s = 0; s < L; ++s) {
          mean.p[s] += p[s];
          const double x = static_cast<double>(g.position(s));
          m2 += p[s] * x * x;
        }
        if (want_occ)
          for (std::size_t s = 0; s < L; ++s) site_m[s].add(p[s]);
        p0_m.add(p[g.origin()]);
        msd_m.add(m2);
        fid_m.add(fid_i[i]);
        ee_m.add(ee_i[i]);
      }
      for (double& v : mean.p) v /= static_cast<double>(M);

      const bool parity_ok = g.kind() != GeometryKind::line || t % 2 == 0;
      if (want_p0 && parity_ok) emit_row("p0", p0_m.mean(), p0_m.std_error());
      if (want_fid) emit_row("fidelity", fid_m.mean(), fid_m.std_error());
      if (want_mix) {
        const ProbDist flat = flat_distribution(g, t);
        const double m = mixing_ratio(mean, flat);
        // Grouped jackknife over up to 10 contiguous realization blocks.
        double err = 0.0;
        const std::size_t blocks = std::min<std::size_t>(10, M);
        if (blocks >= 2) {
          std::vector<double> est(blocks);
          ProbDist loo{g, t, std::vector<double>(L)};
          for (std::size_t b = 0; b < blocks; ++b) {
            const std::size_t lo = M * b / blocks, hi = M * (b + 1) / blocks;
            std::fill(loo.p.begin(), loo.p.end(), 0.0);
            for (std::size_t i = lo; i < hi; ++i)
              for (std::size_t s = 0; s < L; ++s) loo.p[s] += occ[i * L + s];
            const double rest = static_cast<double>(M - (hi - lo));
            for (std::size_t s = 0; s < L; ++s)
              loo.p[s] = (mean.p[s] * static_cast<double>(M) - loo.p[s]) / rest;
            est[b] = mixing_ratio(loo, flat);
          }
          double avg = 0.0;
          for (double e : est) avg += e;
          avg /= static_cast<double>(blocks);
          double ss = 0.0;
          for (double e : est) ss += (e - avg) * (e - avg);
          err = std::sqrt(ss * static_cast<double>(blocks - 1) / static_cast<double>(blocks));
        }
        emit_row("mixing", m, err);
      }
      if (want_msd) emit_row("msd", msd_m.mean(), msd_m.std_error());
      if (want_ee) emit_row("ee", ee_m.mean(), ee_m.std_error());
      if (want_neg) emit_row("negativity", negativity(ensemble_density(states)), 0.0);
      if (want_occ) {
        for (std::size_t s = 0; s < L; ++s) {
          const long x = g.position(s);
          if (g.kind() == GeometryKind::line && std::abs(x) > static_cast<long>(t)) continue;
          emit_row("p[" + std::to_string(x) + "]", mean.p[s], site_m[s].std_error());
        }
      }
      if (want_sigma) {
        msd_series.times.push_back(t);
        msd_series.msd.push_back(msd_m.mean());
      }
    }

    if (want_sigma) {
      for (const auto& pt : growth_exponent(msd_series, config.smoothing))
        if (pt.time >= config.sigma_min_time) table.push_back({W, pt.time, "sigma", pt.sigma, 0.0, N});
    }
  }
  return table;
}

}  // namespace qwalk
