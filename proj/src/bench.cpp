// Copyright 2026 The msc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "msc/bench.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "msc/errors.hpp"
#include "msc/metrics.hpp"
#include "msc/parallel.hpp"
#include "msc/pipeline.hpp"
#include "msc/process_comm.hpp"

namespace msc::bench {

namespace {

using Clock = std::chrono::steady_clock;

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string dims_string(const std::array<std::size_t, 3>& d) {
  return std::to_string(d[0]) + "x" + std::to_string(d[1]) + "x" +
         std::to_string(d[2]);
}

std::array<std::size_t, 3> parse_dims(const std::string& s) {
  std::array<std::size_t, 3> d{};
  char x1 = 0, x2 = 0;
  std::istringstream in(s);
  if (!(in >> d[0] >> x1 >> d[1] >> x2 >> d[2]) || x1 != 'x' || x2 != 'x') {
    throw FormatError("bad dims field: " + s);
  }
  return d;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               const std::string& header) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw FormatError("unexpected CSV header in " + path);
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (lo <= 0.0 || hi < lo || n == 0) {
    throw std::invalid_argument("log_spaced requires 0 < lo <= hi and n >= 1");
  }
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo * std::exp(step * static_cast<double>(i));
  }
  return out;
}

ParallelRunStats run_parallel_job(int np, const SyntheticSpec& spec,
                                  std::optional<double> eps) {
  // Workers are forked; the root reports back through a scratch file.
  const std::string report =
      (std::filesystem::temp_directory_path() /
       ("msc_job_" + std::to_string(::getpid()) + "_" +
        std::to_string(Clock::now().time_since_epoch().count()) + ".txt"))
          .string();

  par::ParallelConfig config;
  config.synthetic = spec;
  config.eps = eps;
  const int rc = par::fork_workers(np, [&](par::Communicator& world) {
    auto outcome = par::parallel_msc(world, config);
    if (!outcome) return;
    const GroundTruth truth = ground_truth_of(spec);
    const std::array<ClusterSet, 3> t = {truth.j1, truth.j2, truth.j3};
    const std::array<ClusterSet, 3> f = {outcome->result.modes[0].cluster,
                                         outcome->result.modes[1].cluster,
                                         outcome->result.modes[2].cluster};
    const double rec = recovery_rate(t, f);
    double sim = 0.0;
    for (const auto& m : outcome->result.modes) sim += m.cluster_similarity;
    sim /= 3.0;
    par::PhaseTimings peak;
    for (const auto& rt : outcome->timings) {
      peak.eigen = std::max(peak.eigen, rt.phases.eigen);
      peak.assemble = std::max(peak.assemble, rt.phases.assemble);
      peak.similarity = std::max(peak.similarity, rt.phases.similarity);
      peak.gather = std::max(peak.gather, rt.phases.gather);
      peak.select = std::max(peak.select, rt.phases.select);
      peak.total = std::max(peak.total, rt.phases.total);
    }
    std::ofstream out(report);
    out << format_double(rec) << ' ' << format_double(sim) << ' '
        << format_double(peak.total) << ' ' << format_double(peak.eigen) << ' '
        << format_double(peak.assemble) << ' ' << format_double(peak.similarity)
        << ' ' << format_double(peak.gather) << ' '
        << format_double(peak.select) << '\n';
  });
  if (rc != 0) {
    std::remove(report.c_str());
    throw CommError("parallel job failed (np=" + std::to_string(np) + ")");
  }
  std::ifstream in(report);
  ParallelRunStats stats;
  if (!(in >> stats.rec >> stats.sim >> stats.seconds >> stats.phases.eigen >>
        stats.phases.assemble >> stats.phases.similarity >>
        stats.phases.gather >> stats.phases.select)) {
    std::remove(report.c_str());
    throw CommError("parallel job produced no report");
  }
  stats.phases.total = stats.seconds;
  in.close();
  std::remove(report.c_str());
  return stats;
}

std::vector<GammaRow> run_experiment_gamma_sweep(const GammaSweepConfig& config,
                                                 std::vector<BenchRecord>* records) {
  if (config.gammas.empty()) throw std::invalid_argument("no gamma values");
  if (config.reps == 0) throw std::invalid_argument("reps must be >= 1");

  SyntheticSpec spec;
  spec.dims = config.dims;
  spec.l = config.l != 0 ? config.l : default_cluster_size(config.dims);

  std::vector<GammaRow> rows;
  rows.reserve(config.gammas.size());
  for (double gamma : config.gammas) {
    spec.gamma = gamma;
    std::vector<double> recs, sims;
    for (std::size_t rep = 0; rep < config.reps; ++rep) {
      spec.seed = config.seed + rep;  // resample the noise
      BenchRecord record;
      record.dims = spec.dims;
      record.gamma = gamma;
      record.eps = config.eps.value_or(0.0);
      record.seed = spec.seed;
      if (config.np > 0) {
        const ParallelRunStats stats =
            run_parallel_job(config.np, spec, config.eps);
        record.p = config.np;
        record.seconds = stats.seconds;
        record.phases = stats.phases;
        record.rec = stats.rec;
        record.sim = stats.sim;
      } else {
        auto [tensor, truth] = generate(spec);
        const auto t0 = Clock::now();
        const TriclusterResult result = run_msc(tensor, config.eps);
        record.seconds =
            std::chrono::duration<double>(Clock::now() - t0).count();
        record.phases.total = record.seconds;
        const QualityReport q = evaluate(truth, result);
        record.rec = q.rec;
        record.sim = q.sim;
      }
      recs.push_back(record.rec);
      sims.push_back(record.sim);
      if (records) records->push_back(record);
    }
    GammaRow row;
    row.gamma = gamma;
    std::tie(row.rec_mean, row.rec_std) = mean_std(recs);
    std::tie(row.sim_mean, row.sim_std) = mean_std(sims);
    rows.push_back(row);
  }
  return rows;
}

void write_gamma_csv(const std::string& path, const std::vector<GammaRow>& rows) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << "gamma,rec_mean,rec_std,sim_mean,sim_std\n";
  for (const auto& r : rows) {
    out << format_double(r.gamma) << ',' << format_double(r.rec_mean) << ','
        << format_double(r.rec_std) << ',' << format_double(r.sim_mean) << ','
        << format_double(r.sim_std) << '\n';
  }
}

std::vector<GammaRow> read_gamma_csv(const std::string& path) {
  const auto raw = read_csv(path, "gamma,rec_mean,rec_std,sim_mean,sim_std");
  std::vector<GammaRow> rows;
  for (const auto& f : raw) {
    if (f.size() != 5) throw FormatError("bad row in " + path);
    rows.push_back({std::stod(f[0]), std::stod(f[1]), std::stod(f[2]),
                    std::stod(f[3]), std::stod(f[4])});
  }
  return rows;
}

std::vector<ScalingRow> run_experiment_scaling(const ScalingConfig& config) {
  if (config.dims_list.empty()) throw std::invalid_argument("no dims");
  if (config.reps == 0) throw std::invalid_argument("reps must be >= 1");

  std::vector<ScalingRow> rows;
  for (const auto& dims : config.dims_list) {
    SyntheticSpec spec;
    spec.dims = dims;
    spec.l = config.l != 0 ? config.l : default_cluster_size(dims);
    spec.gamma =
        config.gamma != 0.0 ? config.gamma : static_cast<double>(dims[0]);

    std::vector<double> seq_times;
    for (std::size_t rep = 0; rep < config.reps; ++rep) {
      spec.seed = config.seed + rep;
      auto [tensor, truth] = generate(spec);
      const auto t0 = Clock::now();
      run_msc(tensor, config.eps);
      seq_times.push_back(
          std::chrono::duration<double>(Clock::now() - t0).count());
    }
    ScalingRow seq_row;
    seq_row.dims = dims;
    seq_row.p = 1;
    std::tie(seq_row.seconds_mean, seq_row.seconds_std) = mean_std(seq_times);
    seq_row.speedup_vs_sequential = 1.0;
    rows.push_back(seq_row);

    for (int p : config.procs) {
      std::vector<double> times;
      for (std::size_t rep = 0; rep < config.reps; ++rep) {
        spec.seed = config.seed + rep;
        times.push_back(run_parallel_job(p, spec, config.eps).seconds);
      }
      ScalingRow row;
      row.dims = dims;
      row.p = p;
      std::tie(row.seconds_mean, row.seconds_std) = mean_std(times);
      row.speedup_vs_sequential = seq_row.seconds_mean / row.seconds_mean;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_scaling_csv(const std::string& path,
                       const std::vector<ScalingRow>& rows) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << "dims,p,seconds_mean,seconds_std,speedup_vs_sequential\n";
  for (const auto& r : rows) {
    out << dims_string(r.dims) << ',' << r.p << ','
        << format_double(r.seconds_mean) << ',' << format_double(r.seconds_std)
        << ',' << format_double(r.speedup_vs_sequential) << '\n';
  }
}

std::vector<ScalingRow> read_scaling_csv(const std::string& path) {
  const auto raw =
      read_csv(path, "dims,p,seconds_mean,seconds_std,speedup_vs_sequential");
  std::vector<ScalingRow> rows;
  for (const auto& f : raw) {
    if (f.size() != 5) throw FormatError("bad row in " + path);
    ScalingRow r;
    r.dims = parse_dims(f[0]);
    r.p = std::stoi(f[1]);
    r.seconds_mean = std::stod(f[2]);
    r.seconds_std = std::stod(f[3]);
    r.speedup_vs_sequential = std::stod(f[4]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace msc::bench
