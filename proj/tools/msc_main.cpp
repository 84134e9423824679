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

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "msc/bench.hpp"
#include "msc/metrics.hpp"
#include "msc/parallel.hpp"
#include "msc/pipeline.hpp"
#include "msc/process_comm.hpp"
#include "msc/serialize.hpp"
#include "msc/synthetic.hpp"
#include "msc/tensor.hpp"

namespace {

std::array<std::size_t, 3> to_dims(const std::vector<std::size_t>& v) {
  if (v.size() == 1) return {v[0], v[0], v[0]};
  if (v.size() == 3) return {v[0], v[1], v[2]};
  throw CLI::ValidationError("--dims takes one value (cube) or three");
}

void warn_about(const msc::ModeResult& r) {
  if (!r.hypothesis_ok) {
    std::fprintf(stderr,
                 "msc: warning: mode %d: eps=%g violates sqrt(eps) <= 1/(m-l) "
                 "at m=%zu, l=%zu\n",
                 r.mode, r.eps, r.m, r.cluster.indices.size());
  }
  if (r.degenerate_gap) {
    std::fprintf(stderr,
                 "msc: warning: mode %d: all marginals equal, no gap exists; "
                 "returning every index\n",
                 r.mode);
  }
}

void emit_result(const nlohmann::json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    msc::save_json_file(j, out_path);
  }
}

std::string default_timings_path(const std::string& out_path) {
  if (out_path.empty()) return "msc_timings.csv";
  const auto dot = out_path.rfind(".json");
  if (dot != std::string::npos && dot == out_path.size() - 5) {
    return out_path.substr(0, dot) + "_timings.csv";
  }
  return out_path + "_timings.csv";
}

struct ParCliOptions {
  std::vector<std::size_t> dims;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  double cluster_frac = 0.1;
  std::size_t cluster_size = 0;
  std::string in_path;
  double eps = 0.0;
  bool eps_set = false;
  std::string out_path;
  std::string timings_path;
  int np = 0;
  std::string serve_socket;
};

msc::par::ParallelConfig par_config_from(const ParCliOptions& opt) {
  msc::par::ParallelConfig config;
  if (!opt.in_path.empty()) {
    config.tensor_file = opt.in_path;
  } else if (!opt.dims.empty()) {
    msc::SyntheticSpec spec;
    spec.dims = to_dims(opt.dims);
    spec.l = opt.cluster_size != 0
                 ? opt.cluster_size
                 : msc::default_cluster_size(spec.dims, opt.cluster_frac);
    spec.gamma = opt.gamma;
    spec.seed = opt.seed;
    config.synthetic = spec;
  } else {
    throw CLI::ValidationError("par needs --in or --dims");
  }
  if (opt.eps_set) config.eps = opt.eps;
  return config;
}

// Runs on every rank; the global root writes the result JSON and the
// per-phase timings CSV.
void par_worker_body(msc::par::Communicator& world, const ParCliOptions& opt) {
  const auto config = par_config_from(opt);
  auto outcome = msc::par::parallel_msc(world, config);
  if (!outcome) return;

  const std::string timings =
      opt.timings_path.empty() ? default_timings_path(opt.out_path)
                               : opt.timings_path;
  msc::par::write_timings_csv(timings, outcome->timings);
  for (const auto& mode : outcome->result.modes) warn_about(mode);
  emit_result(msc::tricluster_to_json(outcome->result, timings), opt.out_path);
}

int cmd_gen(const std::vector<std::size_t>& dims_in, double gamma,
            std::uint64_t seed, double cluster_frac, std::size_t cluster_size,
            const std::string& out_path, const std::string& truth_path) {
  msc::SyntheticSpec spec;
  spec.dims = to_dims(dims_in);
  spec.l = cluster_size != 0 ? cluster_size
                             : msc::default_cluster_size(spec.dims, cluster_frac);
  spec.gamma = gamma;
  spec.seed = seed;
  auto [tensor, truth] = msc::generate(spec);
  msc::save_tensor(tensor, out_path);
  if (!truth_path.empty()) {
    msc::save_json_file(msc::ground_truth_to_json(truth), truth_path);
  }
  std::fprintf(stderr, "msc: wrote %zux%zux%zu tensor (l=%zu, gamma=%g) to %s\n",
               spec.dims[0], spec.dims[1], spec.dims[2], spec.l, spec.gamma,
               out_path.c_str());
  return 0;
}

int cmd_run(const std::string& in_path, double eps, bool eps_set,
            const std::string& out_path) {
  const msc::Tensor3 t = msc::load_tensor(in_path);
  const std::optional<double> eps_opt =
      eps_set ? std::optional<double>(eps) : std::nullopt;
  const msc::TriclusterResult result = msc::run_msc(t, eps_opt);
  for (const auto& mode : result.modes) warn_about(mode);
  emit_result(msc::tricluster_to_json(result, std::nullopt), out_path);
  return 0;
}

int cmd_par(const ParCliOptions& opt) {
  if (!opt.serve_socket.empty()) {
    if (opt.np <= 0) throw CLI::ValidationError("--serve-hub requires --np");
    return msc::par::serve_hub(opt.serve_socket, opt.np);
  }
  if (const auto env = msc::par::discover_worker_env()) {
    auto comm = msc::par::connect_hub(*env);
    par_worker_body(*comm, opt);
    return 0;
  }
  if (opt.np <= 0) {
    throw CLI::ValidationError(
        "par needs --np (self-launch) or a launcher environment "
        "(MSC_WORLD_SIZE/MSC_RANK/MSC_HUB_SOCKET)");
  }
  return msc::par::fork_workers(
      opt.np, [&](msc::par::Communicator& world) { par_worker_body(world, opt); });
}

int cmd_eval(const std::string& truth_path, const std::string& result_path,
             const std::string& out_path) {
  const msc::GroundTruth truth =
      msc::ground_truth_from_json(msc::load_json_file(truth_path));
  const msc::TriclusterResult result =
      msc::tricluster_from_json(msc::load_json_file(result_path));

  msc::QualityReport q;
  const std::array<msc::ClusterSet, 3> t = {truth.j1, truth.j2, truth.j3};
  const std::array<msc::ClusterSet, 3> f = {result.modes[0].cluster,
                                            result.modes[1].cluster,
                                            result.modes[2].cluster};
  q.rec = msc::recovery_rate(t, f, &q.rec_per_mode);
  // The similarity matrices stay with the run; results carry the mean
  // in-cluster similarity per mode instead.
  double sim = 0.0;
  for (int m = 0; m < 3; ++m) {
    q.sim_per_mode[m] = result.modes[m].cluster_similarity;
    sim += q.sim_per_mode[m];
  }
  q.sim = sim / 3.0;
  emit_result(msc::quality_to_json(q), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-slice clustering of 3rd-order tensors"};
  app.require_subcommand(1);

  // --- gen ---------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate a synthetic planted tensor");
  std::vector<std::size_t> gen_dims;
  double gen_gamma = 0.0, gen_frac = 0.1;
  std::size_t gen_l = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out, gen_truth;
  gen->add_option("--dims", gen_dims, "Tensor dims: one value (cube) or three")
      ->required()
      ->expected(1, 3);
  gen->add_option("--gamma", gen_gamma, "Signal strength")->required();
  gen->add_option("--seed", gen_seed, "Noise seed");
  gen->add_option("--cluster-frac", gen_frac,
                  "Planted cluster fraction of the smallest mode");
  gen->add_option("--cluster-size", gen_l, "Planted cluster size (overrides frac)");
  gen->add_option("--out", gen_out, "Output tensor file (MSC3)")->required();
  gen->add_option("--ground-truth", gen_truth, "Write ground-truth JSON here");

  // --- run ---------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Sequential clustering of a tensor file");
  std::string run_in, run_out;
  double run_eps = 0.0;
  run->add_option("--in", run_in, "Input tensor file")->required();
  auto* run_eps_opt = run->add_option("--eps", run_eps, "Similarity threshold");
  run->add_option("--out", run_out, "Result JSON path (stdout when omitted)");

  // --- par ---------------------------------------------------------------
  auto* par = app.add_subcommand("par", "SPMD clustering (three process groups)");
  ParCliOptions par_opt;
  par->add_option("--np", par_opt.np, "Self-launch this many worker processes");
  par->add_option("--in", par_opt.in_path, "Input tensor file (root scatters)");
  par->add_option("--dims", par_opt.dims,
                  "Synthetic tensor dims (regenerated locally on every rank)")
      ->expected(1, 3);
  par->add_option("--gamma", par_opt.gamma, "Synthetic signal strength");
  par->add_option("--seed", par_opt.seed, "Synthetic noise seed");
  par->add_option("--cluster-frac", par_opt.cluster_frac,
                  "Synthetic planted cluster fraction");
  par->add_option("--cluster-size", par_opt.cluster_size,
                  "Synthetic planted cluster size");
  auto* par_eps_opt = par->add_option("--eps", par_opt.eps, "Similarity threshold");
  par->add_option("--out", par_opt.out_path, "Result JSON path (root)");
  par->add_option("--timings", par_opt.timings_path,
                  "Per-phase timings CSV path (root)");
  par->add_option("--serve-hub", par_opt.serve_socket,
                  "Serve the rendezvous hub on this Unix socket and exit");

  // --- eval --------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "Score a result against ground truth");
  std::string eval_truth, eval_result, eval_out;
  eval->add_option("--truth", eval_truth, "Ground-truth JSON")->required();
  eval->add_option("--result", eval_result, "Result JSON")->required();
  eval->add_option("--out", eval_out, "Report JSON path (stdout when omitted)");

  // --- bench -------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Experiment drivers emitting CSV");
  bench->require_subcommand(1);

  auto* bg = bench->add_subcommand("gamma", "Quality vs signal strength sweep");
  std::vector<std::size_t> bg_dims{100};
  double bg_min = 10.0, bg_max = 1000.0, bg_eps = 0.0;
  std::size_t bg_count = 10, bg_reps = 10, bg_l = 0;
  std::uint64_t bg_seed = 1;
  int bg_np = 0;
  std::string bg_out;
  bg->add_option("--dims", bg_dims, "Tensor dims")->expected(1, 3);
  bg->add_option("--gamma-min", bg_min, "Smallest gamma");
  bg->add_option("--gamma-max", bg_max, "Largest gamma");
  bg->add_option("--gamma-count", bg_count, "Number of log-spaced gammas");
  bg->add_option("--reps", bg_reps, "Noise resamples per gamma");
  bg->add_option("--cluster-size", bg_l, "Planted cluster size");
  auto* bg_eps_opt = bg->add_option("--eps", bg_eps, "Similarity threshold");
  bg->add_option("--seed", bg_seed, "Base seed");
  bg->add_option("--np", bg_np, "Run each job on this many processes");
  bg->add_option("--out", bg_out, "Output CSV")->required();

  auto* bs = bench->add_subcommand("scaling", "Strong-scaling measurement");
  std::vector<std::size_t> bs_dims{200};
  std::vector<std::size_t> bs_sizes;
  std::vector<int> bs_procs{3, 6, 12};
  std::size_t bs_reps = 3, bs_l = 0;
  double bs_gamma = 0.0, bs_eps = 0.0;
  std::uint64_t bs_seed = 1;
  std::string bs_out;
  bs->add_option("--dims", bs_dims, "Tensor dims")->expected(1, 3);
  bs->add_option("--sizes", bs_sizes,
                 "Sweep cubic tensors of these edge sizes instead of --dims");
  bs->add_option("--procs", bs_procs, "Process counts (multiples of 3)");
  bs->add_option("--reps", bs_reps, "Repetitions per configuration");
  bs->add_option("--gamma", bs_gamma,
                 "Signal strength (defaults to the first mode size)");
  bs->add_option("--cluster-size", bs_l, "Planted cluster size");
  auto* bs_eps_opt = bs->add_option("--eps", bs_eps, "Similarity threshold");
  bs->add_option("--seed", bs_seed, "Base seed");
  bs->add_option("--out", bs_out, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen(gen_dims, gen_gamma, gen_seed, gen_frac, gen_l, gen_out,
                     gen_truth);
    }
    if (run->parsed()) {
      return cmd_run(run_in, run_eps, run_eps_opt->count() > 0, run_out);
    }
    if (par->parsed()) {
      par_opt.eps_set = par_eps_opt->count() > 0;
      return cmd_par(par_opt);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_truth, eval_result, eval_out);
    }
    if (bench->parsed()) {
      if (bg->parsed()) {
        msc::bench::GammaSweepConfig config;
        config.dims = to_dims(bg_dims);
        config.l = bg_l;
        config.gammas = msc::bench::log_spaced(bg_min, bg_max, bg_count);
        config.reps = bg_reps;
        if (bg_eps_opt->count() > 0) config.eps = bg_eps;
        config.seed = bg_seed;
        config.np = bg_np;
        const auto rows = msc::bench::run_experiment_gamma_sweep(config);
        msc::bench::write_gamma_csv(bg_out, rows);
        std::fprintf(stderr, "msc: wrote %zu rows to %s\n", rows.size(),
                     bg_out.c_str());
        return 0;
      }
      msc::bench::ScalingConfig config;
      if (!bs_sizes.empty()) {
        for (std::size_t s : bs_sizes) config.dims_list.push_back({s, s, s});
      } else {
        config.dims_list = {to_dims(bs_dims)};
      }
      config.procs = bs_procs;
      config.reps = bs_reps;
      config.gamma = bs_gamma;
      config.l = bs_l;
      if (bs_eps_opt->count() > 0) config.eps = bs_eps;
      config.seed = bs_seed;
      const auto rows = msc::bench::run_experiment_scaling(config);
      msc::bench::write_scaling_csv(bs_out, rows);
      std::fprintf(stderr, "msc: wrote %zu rows to %s\n", rows.size(),
                   bs_out.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "msc: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
