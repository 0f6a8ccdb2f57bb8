// Copyright 2026 The darktraj authors
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

// Command-line driver: validates Kraus ensembles, runs the dark-subspace
// pipeline (discovery -> invariant measure -> smart family -> group closure
// -> classification -> ergodic sampling -> invariance test) and emits
// convergence curves. All outputs are deterministic functions of
// (configuration, seed); reruns are byte-identical.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "darktraj/io.hpp"
#include "darktraj/presets.hpp"

namespace {

using namespace darktraj;

constexpr double kPi = 3.14159265358979323846;

constexpr int kExitOk = 0;
constexpr int kExitStochasticity = 2;
constexpr int kExitReducible = 3;
constexpr int kExitIo = 4;
constexpr int kExitStage = 5;

int log_level() {
  const char* env = std::getenv("DARKTRAJ_LOG");
  if (!env) return 1;
  const std::string v(env);
  if (v == "quiet") return 0;
  if (v == "debug") return 2;
  return 1;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::fprintf(stderr, "[darktraj] %s\n", msg.c_str());
}

// Everything a run needs: the ensemble, optional preset extras, merged
// configuration and the output sink.
struct RunContext {
  KrausEnsemble ensemble;
  std::optional<Preset> preset;
  Json config = Json::object();
  std::string out_dir;
  std::string format = "csv";
  std::uint64_t seed = 1;
  double rank_tol = tol::rank_rel;

  int config_int(const std::string& section, const std::string& key,
                 int fallback) const {
    if (config.contains(section) && config[section].contains(key))
      return config[section][key].get<int>();
    return fallback;
  }

  std::string config_str(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    if (config.contains(section) && config[section].contains(key))
      return config[section][key].get<std::string>();
    return fallback;
  }

  void emit(const std::string& name, const Json& j) const {
    if (out_dir.empty()) {
      std::printf("%s\n", j.dump(2).c_str());
      return;
    }
    write_json_file(out_dir + "/" + name + ".json", j);
  }

  void emit_csv(const std::string& name, const std::string& content) const {
    if (out_dir.empty()) {
      std::fputs(content.c_str(), stdout);
      return;
    }
    write_text_file(out_dir + "/" + name + ".csv", content);
  }
};

struct CommonArgs {
  std::string config_path;
  std::string ensemble_path;
  int example = 0;
  std::string variant;
  double theta_x = std::sqrt(2.0);
  double theta_z = std::sqrt(3.0);
  double theta = 0.62;
  double phi = 0.41;
  double q = 0.3;
  bool with_v3 = false;
  std::uint64_t seed = 1;
  std::string out_dir;
  std::string format = "csv";
  std::string family_kind = "smart";
  std::string base = "generic";
  double tol_rank = tol::rank_rel;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path,
                  "configuration file (JSON; flags override it)");
  cmd->add_option("--ensemble", args.ensemble_path,
                  "ensemble file (JSON with dim and kraus items)");
  cmd->add_option("--example", args.example, "built-in preset 1|2|3");
  cmd->add_option("--variant", args.variant,
                  "example 1 angle variant 5a|5b|5c");
  cmd->add_option("--theta-x", args.theta_x, "example 1 rotation about x");
  cmd->add_option("--theta-z", args.theta_z, "example 1 rotation about z");
  cmd->add_option("--theta", args.theta, "example 2 reflection angle");
  cmd->add_option("--phi", args.phi, "example 2 rotation angle");
  cmd->add_option("--q", args.q, "example 3 weight, in (0, 1/2)");
  cmd->add_flag("--with-v3", args.with_v3,
                "example 3: add the Id (x) i sigma_y operator");
  cmd->add_option("--seed", args.seed, "64-bit seed for all sampling");
  cmd->add_option("--out", args.out_dir, "output directory (stdout if unset)");
  cmd->add_option("--format", args.format, "csv|json artifact preference")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--family", args.family_kind,
                  "isometry family construction: smart|embedding")
      ->check(CLI::IsMember({"smart", "embedding"}));
  cmd->add_option("--base", args.base,
                  "ergodic base ray: generic|e0 (reference space)");
  cmd->add_option("--tol-rank", args.tol_rank,
                  "relative numerical-rank tolerance used by discovery");
}

RunContext make_context(const CommonArgs& args) {
  RunContext ctx;
  ctx.seed = args.seed;
  ctx.out_dir = args.out_dir;
  ctx.format = args.format;
  ctx.rank_tol = args.tol_rank;
  if (!args.config_path.empty()) {
    ctx.config = read_json_file(args.config_path);
    if (ctx.config.contains("seed"))
      ctx.seed = ctx.config["seed"].get<std::uint64_t>();
    if (ctx.config.contains("out") && ctx.out_dir.empty())
      ctx.out_dir = ctx.config["out"].get<std::string>();
    if (ctx.config.contains("format"))
      ctx.format = ctx.config["format"].get<std::string>();
  }

  int example = args.example;
  if (example == 0 && ctx.config.contains("example"))
    example = ctx.config["example"].value("id", 0);

  if (!args.ensemble_path.empty()) {
    ctx.ensemble = ensemble_from_json(read_json_file(args.ensemble_path));
  } else if (ctx.config.contains("ensemble") &&
             ctx.config["ensemble"].is_object() &&
             !ctx.config["ensemble"].contains("file")) {
    ctx.ensemble = ensemble_from_json(ctx.config["ensemble"]);
  } else if (ctx.config.contains("ensemble") &&
             ctx.config["ensemble"].contains("file")) {
    ctx.ensemble = ensemble_from_json(
        read_json_file(ctx.config["ensemble"]["file"].get<std::string>()));
  } else if (example == 1) {
    double tx = args.theta_x, tz = args.theta_z;
    if (args.variant == "5a") {
      tx = std::sqrt(2.0);
      tz = std::sqrt(3.0);
    } else if (args.variant == "5b") {
      tx = kPi;
      tz = std::sqrt(2.0);
    } else if (args.variant == "5c") {
      tx = kPi;
      tz = kPi;
    }
    ctx.preset = example_one(tx, tz);
    ctx.ensemble = ctx.preset->ensemble;
  } else if (example == 2) {
    ctx.preset = example_two(args.theta, args.phi);
    ctx.ensemble = ctx.preset->ensemble;
  } else if (example == 3) {
    ctx.preset = example_three(args.q, args.with_v3);
    ctx.ensemble = ctx.preset->ensemble;
  } else {
    throw IoError("no ensemble given: use --example, --ensemble or --config");
  }

  if (!ctx.out_dir.empty()) std::filesystem::create_directories(ctx.out_dir);
  return ctx;
}

Ray base_ray(const std::string& kind, int r_m) {
  CVector v = CVector::Zero(r_m);
  if (kind == "e0") {
    v(0) = 1.0;
  } else {
    // Fixed generic direction; avoids eigenvectors of the preset Paulis.
    v(0) = Complex(0.8, 0.0);
    v(1 % r_m) += Complex(0.35, 0.45);
  }
  return Ray(v);
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

Json run_validate(RunContext& ctx, int* exit_code) {
  const ValidationReport v = validate_ensemble(ctx.ensemble);
  Json j;
  if (!v.passed) {
    j["stochasticity_residual"] = v.residual;
    j["stochasticity_passed"] = false;
    *exit_code = kExitStochasticity;
    return j;
  }
  const ChannelReport r = channel_report(ctx.ensemble);
  j = channel_report_to_json(v, r);
  *exit_code = r.is_irreducible ? kExitOk : kExitReducible;
  return j;
}

DarkAtlas stage_discover(RunContext& ctx) {
  const int probes = ctx.config_int("discover", "probes", 16);
  const int fallback_len = ctx.preset ? ctx.preset->suggested_chain_len : 1000;
  const int chain_len = ctx.config_int("discover", "chain_len", fallback_len);
  SplitMix64 root(ctx.seed);
  return discover_maximal_dark(ctx.ensemble, probes, chain_len,
                               root.fork(1).next_u64(), ctx.rank_tol);
}

EmpiricalDarkMeasure stage_chi(RunContext& ctx, const DarkAtlas& atlas) {
  const int burn = ctx.config_int("chi", "burn", 200);
  const int keep = ctx.config_int("chi", "keep", 10000);
  SplitMix64 root(ctx.seed);
  return estimate_chi_inv(ctx.ensemble, atlas, burn, keep,
                          root.fork(2).next_u64());
}

// Prefers a preset's canonical plane as the smart-family center so the
// reference-space basis (and hence the literal group generators) matches the
// block embeddings.
IsometryFamily stage_family(RunContext& ctx, const DarkAtlas& atlas,
                            const EmpiricalDarkMeasure& chi) {
  WordSearchLimits limits;
  limits.max_length = ctx.config_int("family", "max_word_len", 20);
  limits.max_words = ctx.config_int("family", "max_words", 10000);

  if (ctx.preset) {
    for (std::size_t k = 0; k < ctx.preset->canonical_dark.size(); ++k) {
      for (const auto& atom : chi.atoms) {
        if (gap_distance(atom, ctx.preset->canonical_dark[k]) <=
            tol::atlas_dedup) {
          return build_smart_family(ctx.ensemble, atlas, chi,
                                    ctx.preset->canonical_dark[k],
                                    ctx.preset->canonical_embeddings[k],
                                    limits);
        }
      }
    }
  }
  // Generic ensembles: center on the heaviest chi atom with its own basis.
  std::size_t heaviest = 0;
  for (std::size_t a = 1; a < chi.atoms.size(); ++a)
    if (chi.weights[a] > chi.weights[heaviest]) heaviest = a;
  return build_smart_family(ctx.ensemble, atlas, chi, chi.atoms[heaviest],
                            chi.atoms[heaviest].basis(), limits);
}

IsometryFamily stage_embedding_family(RunContext& ctx,
                                      const EmpiricalDarkMeasure& chi) {
  if (!ctx.preset)
    throw PreconditionError("embedding family requires a preset ensemble");
  std::vector<IsometryEntry> entries;
  for (std::size_t k = 0; k < ctx.preset->canonical_dark.size(); ++k)
    entries.push_back(IsometryEntry{ctx.preset->canonical_dark[k],
                                    ctx.preset->canonical_embeddings[k]});
  for (const auto& atom : chi.atoms) {
    bool covered = false;
    for (const auto& en : entries)
      if (gap_distance(en.D, atom) <= tol::atlas_dedup) covered = true;
    if (!covered)
      throw ReachabilityError(
          "embedding family does not cover a chi atom; use --family smart");
  }
  return IsometryFamily(ctx.preset->canonical_dark[0].dim(),
                        std::move(entries), 0);
}

Json ergodic_json(const ErgodicSampleSet& set) {
  Json samples = Json::array();
  for (std::size_t k = 0; k < set.rays.size(); ++k) {
    Json one;
    one["dark_index"] = set.dark_indices[k];
    Json coords = Json::array();
    for (int i = 0; i < set.rays[k].dim(); ++i)
      coords.push_back(Json::array({set.rays[k].representative()(i).real(),
                                    set.rays[k].representative()(i).imag()}));
    one["ray"] = std::move(coords);
    samples.push_back(std::move(one));
  }
  Json j;
  j["samples"] = std::move(samples);
  return j;
}

std::string ergodic_csv(const ErgodicSampleSet& set) {
  std::string csv = "sample,dark_index";
  const int d = set.rays.empty() ? 0 : set.rays.front().dim();
  for (int i = 0; i < d; ++i) {
    csv += ",re" + std::to_string(i);
    csv += ",im" + std::to_string(i);
  }
  csv += "\n";
  for (std::size_t s = 0; s < set.rays.size(); ++s) {
    csv += std::to_string(s) + "," + std::to_string(set.dark_indices[s]);
    for (int i = 0; i < d; ++i) {
      const Complex z = set.rays[s].representative()(i);
      csv += "," + format_double(z.real());
      csv += "," + format_double(z.imag());
    }
    csv += "\n";
  }
  return csv;
}

// Bloch export when the reference space is a qubit: each ray is pulled back
// through its dark subspace's isometry.
std::string bloch_csv(const ErgodicSampleSet& set, const IsometryFamily& fam,
                      const EmpiricalDarkMeasure& chi) {
  std::string csv = "bx,by,bz,weight,sphere_index\n";
  const double w = 1.0 / static_cast<double>(set.rays.size());
  for (std::size_t s = 0; s < set.rays.size(); ++s) {
    const int atom = set.dark_indices[s];
    const int entry = fam.find(chi.atoms[atom]);
    const CVector z =
        fam.entry(entry).J.adjoint() * set.rays[s].representative();
    const auto b = bloch_coords(Ray(z));
    csv += format_double(b[0]) + "," + format_double(b[1]) + "," +
           format_double(b[2]) + "," + format_double(w) + "," +
           std::to_string(atom) + "\n";
  }
  return csv;
}

Json summarize(const ChannelReport& report, const DarkAtlas& atlas,
               const EmpiricalDarkMeasure& chi, const UnitaryGroupClosure& g,
               Transitivity verdict, const InvarianceResidual& inv) {
  Json s;
  s["r_m"] = atlas.r_m;
  s["atlas_size"] = atlas.representatives.size();
  s["period"] = report.period;
  s["is_irreducible"] = report.is_irreducible;
  s["chi_atoms"] = chi.atoms.size();
  s["group_kind"] =
      g.kind == UnitaryGroupClosure::Kind::kFinite ? "finite" : "continuous";
  if (g.kind == UnitaryGroupClosure::Kind::kFinite)
    s["group_order"] = g.elements.size();
  else
    s["group_lie_dim"] = g.lie_dim;
  s["transitivity"] = to_string(verdict);
  // The invariant measure is unique iff the minimal group acts transitively
  // on the reference projective space.
  s["unique_invariant_measure"] =
      (verdict == Transitivity::kFullSU ||
       verdict == Transitivity::kSymplecticConjugate)
          ? "unique"
          : (verdict == Transitivity::kNotTransitive ? "non_unique"
                                                     : "undecided");
  s["invariance_w1"] = inv.w1;
  s["invariance_null_mean"] = inv.null_mean;
  s["invariance_residual"] = inv.residual;
  s["invariance_se"] = inv.bootstrap_se;
  return s;
}

int run_pipeline(RunContext& ctx, const CommonArgs& args) {
  std::string stage = "validate";
  try {
    ctx.emit("ensemble", ensemble_to_json(ctx.ensemble));
    const ValidationReport v = validate_ensemble(ctx.ensemble);
    if (!v.passed) {
      log_info("stochasticity violated, residual " +
               std::to_string(v.residual));
      return kExitStochasticity;
    }
    const ChannelReport report = channel_report(ctx.ensemble);
    ctx.emit("channel", channel_report_to_json(v, report));

    stage = "discover";
    const DarkAtlas atlas = stage_discover(ctx);
    ctx.emit("atlas", atlas_to_json(atlas));
    log_info("discovered r_m = " + std::to_string(atlas.r_m) + " with " +
             std::to_string(atlas.representatives.size()) +
             " representatives");

    stage = "chi";
    const EmpiricalDarkMeasure chi = stage_chi(ctx, atlas);
    ctx.emit("chi", chi_to_json(chi));

    stage = "family";
    const IsometryFamily fam = args.family_kind == "embedding"
                                   ? stage_embedding_family(ctx, chi)
                                   : stage_family(ctx, atlas, chi);
    ctx.emit("family", family_to_json(fam));

    stage = "group";
    const int cap = ctx.config_int("group", "cap", 4096);
    const UnitaryGroupClosure g =
        group_closure(family_generators(ctx.ensemble, fam, chi), cap);
    ctx.emit("group", group_to_json(g));

    stage = "classify";
    const Transitivity verdict = classify_transitivity(g);

    stage = "ergodic";
    const int n_samples = ctx.config_int("ergodic", "samples", 10000);
    SplitMix64 root(ctx.seed);
    const ErgodicSampleSet set =
        sample_ergodic_measure(fam, chi, base_ray(args.base, fam.r_m()), g,
                               n_samples, root.fork(3).next_u64());
    if (ctx.format == "json")
      ctx.emit("ergodic_samples", ergodic_json(set));
    else
      ctx.emit_csv("ergodic_samples", ergodic_csv(set));
    if (!set.clusters.empty()) {
      Json clusters = Json::array();
      for (const auto& c : set.clusters) {
        Json jc;
        jc["weight"] = c.weight;
        jc["dark_index"] = c.dark_index;
        Json coords = Json::array();
        for (int i = 0; i < c.center.dim(); ++i)
          coords.push_back(Json::array({c.center.representative()(i).real(),
                                        c.center.representative()(i).imag()}));
        jc["center"] = std::move(coords);
        clusters.push_back(std::move(jc));
      }
      Json jc;
      jc["clusters"] = std::move(clusters);
      ctx.emit("clusters", jc);
    }
    if (fam.r_m() == 2) ctx.emit_csv("bloch", bloch_csv(set, fam, chi));

    stage = "invariance";
    const int support = ctx.config_int("invariance", "support", 512);
    const int boot = ctx.config_int("invariance", "boot", 16);
    const InvarianceResidual inv = invariance_residual(
        set.rays, ctx.ensemble, root.fork(4).next_u64(), support, boot);

    stage = "summary";
    ctx.emit("summary", summarize(report, atlas, chi, g, verdict, inv));
    return kExitOk;
  } catch (const IoError& ex) {
    log_info("I/O failure in stage " + stage + ": " + ex.what());
    return kExitIo;
  } catch (const Error& ex) {
    log_info("stage " + stage + " failed: " + ex.what());
    return kExitStage;
  }
}

int run_convergence(RunContext& ctx, const CommonArgs&) {
  std::string stage = "validate";
  try {
    const ValidationReport v = validate_ensemble(ctx.ensemble);
    if (!v.passed) return kExitStochasticity;

    stage = "discover";
    const DarkAtlas atlas = stage_discover(ctx);

    stage = "darkness_gap";
    const int seeds = ctx.config_int("convergence", "seeds", 200);
    const int n_max = ctx.config_int("convergence", "n_max", 60);
    SplitMix64 root(ctx.seed);
    std::string gap_csv = "n,mean_darkness_gap\n";
    std::string per_seed_csv = "seed,n,darkness_gap\n";
    std::vector<double> means(n_max + 1, 0.0);
    for (int s = 0; s < seeds; ++s) {
      SplitMix64 rs = root.fork(100 + s);
      const Ray x0 = random_ray(ctx.ensemble.dim, rs);
      const Trajectory traj =
          run_trajectory(ctx.ensemble, x0, n_max, rs.next_u64());
      for (int n = 0; n <= n_max; ++n) {
        const double gap = darkness_gap(std::get<Ray>(traj.steps[n].state),
                                        atlas.representatives);
        means[n] += gap;
        per_seed_csv += std::to_string(s) + "," + std::to_string(n) + "," +
                        format_double(gap) + "\n";
      }
    }
    ctx.emit_csv("darkness_gap_per_seed", per_seed_csv);
    std::vector<double> xs, ys;
    for (int n = 0; n <= n_max; ++n) {
      means[n] /= seeds;
      gap_csv += std::to_string(n) + "," + format_double(means[n]) + "\n";
      if (n >= 1 && means[n] > 0) {
        xs.push_back(n);
        ys.push_back(std::log(means[n]));
      }
    }
    ctx.emit_csv("darkness_gap", gap_csv);

    stage = "s_n";
    const int sn_max = ctx.config_int("convergence", "sn_max", 8);
    const int sn_samples = ctx.config_int("convergence", "sn_samples", 20000);
    std::string sn_csv = "n,s_n\n";
    std::vector<double> sx, sy;
    const double words =
        std::pow(static_cast<double>(ctx.ensemble.items.size()), sn_max);
    const SnMode mode =
        words <= 1e6 ? SnMode::kExhaustive : SnMode::kMonteCarlo;
    // The decay sequence only exists below the ambient dimension: when the
    // whole space is dark there is no (r_m + 1)-th singular value to track.
    if (atlas.r_m + 1 <= ctx.ensemble.dim) {
      for (int n = 1; n <= sn_max; ++n) {
        const double s = s_of_n(ctx.ensemble, n, mode, atlas.r_m, sn_samples,
                                root.fork(200 + n).next_u64());
        sn_csv += std::to_string(n) + "," + format_double(s) + "\n";
        if (s > 0) {
          sx.push_back(n);
          sy.push_back(std::log(s));
        }
      }
    }
    ctx.emit_csv("s_n", sn_csv);

    stage = "cesaro";
    const int ces_n = ctx.config_int("convergence", "cesaro_n_max", 12);
    const int ces_samples =
        ctx.config_int("convergence", "cesaro_samples", 256);
    EmpiricalDarkMeasure chi0;
    chi0.atoms = {atlas.representatives.front()};
    chi0.weights = {1.0};
    const auto curve =
        cesaro_convergence_curve(ctx.ensemble, atlas, chi0, ces_n,
                                 ces_samples, root.fork(300).next_u64());
    std::string ces_csv = "n,w1\n";
    for (const auto& [n, w1] : curve)
      ces_csv += std::to_string(n) + "," + format_double(w1) + "\n";
    ctx.emit_csv("cesaro_w1", ces_csv);

    stage = "summary";
    Json s;
    if (xs.size() >= 2) {
      const LineFit f = fit_line(xs, ys);
      s["darkness_gap_log_slope"] = f.slope;
      s["darkness_gap_r2"] = f.r2;
    }
    if (sx.size() >= 2) {
      const LineFit f = fit_line(sx, sy);
      s["s_n_log_slope"] = f.slope;
      s["s_n_r2"] = f.r2;
      s["s_n_mode"] =
          mode == SnMode::kExhaustive ? "exhaustive" : "monte_carlo";
    }
    s["cesaro_final_w1"] = curve.back().second;
    ctx.emit("convergence_summary", s);
    return kExitOk;
  } catch (const IoError& ex) {
    log_info("I/O failure in stage " + stage + ": " + ex.what());
    return kExitIo;
  } catch (const Error& ex) {
    log_info("stage " + stage + " failed: " + ex.what());
    return kExitStage;
  }
}

int run_single_stage(RunContext& ctx, const CommonArgs& args,
                     const std::string& which) {
  std::string stage = which;
  try {
    require_valid(ctx.ensemble);
    const DarkAtlas atlas = stage_discover(ctx);
    if (which == "dark") {
      ctx.emit("atlas", atlas_to_json(atlas));
      return kExitOk;
    }
    const EmpiricalDarkMeasure chi = stage_chi(ctx, atlas);
    if (which == "chi") {
      ctx.emit("chi", chi_to_json(chi));
      return kExitOk;
    }
    const IsometryFamily fam = args.family_kind == "embedding"
                                   ? stage_embedding_family(ctx, chi)
                                   : stage_family(ctx, atlas, chi);
    const UnitaryGroupClosure g =
        group_closure(family_generators(ctx.ensemble, fam, chi),
                      ctx.config_int("group", "cap", 4096));
    if (which == "group") {
      ctx.emit("family", family_to_json(fam));
      ctx.emit("group", group_to_json(g));
      return kExitOk;
    }
    SplitMix64 root(ctx.seed);
    const ErgodicSampleSet set = sample_ergodic_measure(
        fam, chi, base_ray(args.base, fam.r_m()), g,
        ctx.config_int("ergodic", "samples", 10000), root.fork(3).next_u64());
    if (ctx.format == "json")
      ctx.emit("ergodic_samples", ergodic_json(set));
    else
      ctx.emit_csv("ergodic_samples", ergodic_csv(set));
    if (fam.r_m() == 2) ctx.emit_csv("bloch", bloch_csv(set, fam, chi));
    return kExitOk;
  } catch (const StochasticityError& ex) {
    log_info(std::string("validation failed: ") + ex.what());
    return kExitStochasticity;
  } catch (const IoError& ex) {
    log_info("I/O failure in stage " + stage + ": " + ex.what());
    return kExitIo;
  } catch (const Error& ex) {
    log_info("stage " + stage + " failed: " + ex.what());
    return kExitStage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "darktraj: quantum trajectories, dark subspaces and their invariant "
      "measures"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* c_validate =
      app.add_subcommand("validate", "stochasticity / irreducibility report");
  CLI::App* c_pipeline =
      app.add_subcommand("pipeline", "run every stage and emit all artifacts");
  CLI::App* c_convergence = app.add_subcommand(
      "convergence", "darkness-gap, s(n) and Cesaro W1 curves");
  CLI::App* c_dark =
      app.add_subcommand("dark", "discover maximal dark subspaces");
  CLI::App* c_chi = app.add_subcommand("chi", "estimate the invariant measure");
  CLI::App* c_group =
      app.add_subcommand("group", "smart family and induced group closure");
  CLI::App* c_ergodic =
      app.add_subcommand("ergodic", "sample an ergodic measure");
  for (CLI::App* cmd : {c_validate, c_pipeline, c_convergence, c_dark, c_chi,
                        c_group, c_ergodic})
    add_common_options(cmd, args);

  CLI11_PARSE(app, argc, argv);

  try {
    RunContext ctx = make_context(args);
    if (c_validate->parsed()) {
      int code = kExitOk;
      const Json report = run_validate(ctx, &code);
      ctx.emit("channel", report);
      return code;
    }
    if (c_pipeline->parsed()) return run_pipeline(ctx, args);
    if (c_convergence->parsed()) return run_convergence(ctx, args);
    if (c_dark->parsed()) return run_single_stage(ctx, args, "dark");
    if (c_chi->parsed()) return run_single_stage(ctx, args, "chi");
    if (c_group->parsed()) return run_single_stage(ctx, args, "group");
    if (c_ergodic->parsed()) return run_single_stage(ctx, args, "ergodic");
  } catch (const IoError& ex) {
    log_info(std::string("I/O error: ") + ex.what());
    return kExitIo;
  } catch (const Error& ex) {
    log_info(std::string("error: ") + ex.what());
    return kExitStage;
  }
  return kExitOk;
}
