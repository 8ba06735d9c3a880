// vemlab: stability and interpolation experiments for Stokes-type virtual
// element local spaces.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "vem/errors.hpp"
#include "vem/harness.hpp"

namespace {

void apply_config_file(const std::string& path, vem::ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw vem::InvalidArgument("cannot open config file: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  cfg.family = j.value("family", cfg.family);
  cfg.index = j.value("index", cfg.index);
  cfg.element_json = j.value("element", cfg.element_json);
  cfg.p = j.value("p", cfg.p);
  cfg.p_max = j.value("p_max", cfg.p_max);
  if (j.contains("stab")) {
    std::string s = j["stab"];
    if (s == "projection") cfg.stab = vem::StabChoice::projection;
    else if (s == "dofi") cfg.stab = vem::StabChoice::dofi;
    else if (s == "both") cfg.stab = vem::StabChoice::both;
    else throw vem::InvalidArgument("config: unknown stab " + s);
  }
  if (j.contains("boundary_term")) {
    std::string s = j["boundary_term"];
    if (s == "integral") cfg.bterm = vem::BoundaryTerm::integral;
    else if (s == "dofsum") cfg.bterm = vem::BoundaryTerm::dofsum;
    else throw vem::InvalidArgument("config: unknown boundary_term " + s);
  }
  cfg.refine = j.value("refine", cfg.refine);
  cfg.auto_refine_tol = j.value("auto_refine_tol", cfg.auto_refine_tol);
  cfg.quad_safety = j.value("quad_safety", cfg.quad_safety);
  cfg.format = j.value("format", cfg.format);
  cfg.out = j.value("out", cfg.out);
  cfg.cache_dir = j.value("cache_dir", cfg.cache_dir);
  cfg.jobs = j.value("jobs", cfg.jobs);
}

void write_out(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) throw vem::InvalidArgument("cannot open output file: " + out);
    f << text;
  }
}

struct CommonFlags {
  std::string config_file;
  std::string stab = "both";
  std::string bterm = "dofsum";

  void attach(CLI::App* app, vem::ExperimentConfig& cfg) {
    app->add_option("--config", config_file, "JSON config file (flags override it)");
    app->add_option("--element", cfg.element_json, "polygon JSON file");
    app->add_option("--family", cfg.family, "builtin family: hanging_node | flatten");
    app->add_option("--index", cfg.index, "family index 1..5")->check(CLI::Range(1, 5));
    app->add_option("--p", cfg.p, "polynomial degree (>= 2)");
    app->add_option("--p-max", cfg.p_max, "sweep upper degree");
    app->add_option("--stab", stab, "projection | dofi | both");
    app->add_option("--boundary-term", bterm, "integral | dofsum");
    app->add_option("--refine", cfg.refine, "fixed FEM level (omit for auto)");
    app->add_option("--auto-refine-tol", cfg.auto_refine_tol,
                    "eigenvalue convergence target for auto refinement");
    app->add_option("--format", cfg.format, "csv | markdown");
    app->add_option("--out", cfg.out, "output file (default stdout)");
    app->add_option("--cache-dir", cfg.cache_dir, "stiffness cache directory");
    app->add_option("--jobs", cfg.jobs, "parallel row computations");
  }

  void finish(vem::ExperimentConfig& cfg, const CLI::App* app) {
    bool have_file = !config_file.empty();
    auto given = [app](const std::string& name) { return app->count(name) > 0; };
    if (have_file) {
      // File first, then re-apply the flags actually given on the command line.
      vem::ExperimentConfig flags = cfg;
      apply_config_file(config_file, cfg);
      if (given("--element")) cfg.element_json = flags.element_json;
      if (given("--family")) cfg.family = flags.family;
      if (given("--index")) cfg.index = flags.index;
      if (given("--p")) cfg.p = flags.p;
      if (given("--p-max")) cfg.p_max = flags.p_max;
      if (given("--refine")) cfg.refine = flags.refine;
      if (given("--auto-refine-tol")) cfg.auto_refine_tol = flags.auto_refine_tol;
      if (given("--format")) cfg.format = flags.format;
      if (given("--out")) cfg.out = flags.out;
      if (given("--cache-dir")) cfg.cache_dir = flags.cache_dir;
      if (given("--jobs")) cfg.jobs = flags.jobs;
    }
    if (!have_file || given("--stab")) {
      if (stab == "projection") cfg.stab = vem::StabChoice::projection;
      else if (stab == "dofi") cfg.stab = vem::StabChoice::dofi;
      else if (stab == "both") cfg.stab = vem::StabChoice::both;
      else throw vem::InvalidArgument("unknown stab: " + stab);
    }
    if (!have_file || given("--boundary-term")) {
      if (bterm == "integral") cfg.bterm = vem::BoundaryTerm::integral;
      else if (bterm == "dofsum") cfg.bterm = vem::BoundaryTerm::dofsum;
      else throw vem::InvalidArgument("unknown boundary term: " + bterm);
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"virtual element stability laboratory"};
  app.require_subcommand(1);

  vem::ExperimentConfig cfg_pspan, cfg_seq, cfg_interp;
  CommonFlags fl_pspan, fl_seq, fl_interp;

  CLI::App* pspan = app.add_subcommand("pspan", "degree sweep on one element");
  fl_pspan.attach(pspan, cfg_pspan);
  CLI::App* seq = app.add_subcommand("sequence", "degenerating element sweep (indices 1..5)");
  fl_seq.attach(seq, cfg_seq);
  CLI::App* interp = app.add_subcommand("interp", "interpolation rate study");
  fl_interp.attach(interp, cfg_interp);
  CLI::App* selfcheck = app.add_subcommand("selfcheck", "FEM manufactured-solution rates");
  std::string sc_format = "csv", sc_out;
  selfcheck->add_option("--format", sc_format, "csv | markdown");
  selfcheck->add_option("--out", sc_out, "output file");

  CLI::App* cache = app.add_subcommand("cache", "cache management");
  cache->require_subcommand(1);
  std::string cache_dir;
  cache->add_option("--cache-dir", cache_dir, "cache directory")->required();
  CLI::App* cache_list_cmd = cache->add_subcommand("list", "list entries");
  CLI::App* cache_clear_cmd = cache->add_subcommand("clear", "remove all entries");
  CLI::App* cache_verify_cmd = cache->add_subcommand("verify", "re-hash sidecars");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (pspan->parsed()) {
      fl_pspan.finish(cfg_pspan, pspan);
      write_out(vem::emit_table(vem::run_pspan(cfg_pspan), cfg_pspan.format), cfg_pspan.out);
    } else if (seq->parsed()) {
      fl_seq.finish(cfg_seq, seq);
      write_out(vem::emit_table(vem::run_sequence(cfg_seq), cfg_seq.format), cfg_seq.out);
    } else if (interp->parsed()) {
      fl_interp.finish(cfg_interp, interp);
      write_out(vem::emit_rates(vem::run_interp_rates(cfg_interp), cfg_interp.format),
                cfg_interp.out);
    } else if (selfcheck->parsed()) {
      write_out(vem::emit_rates(vem::run_fem_selfcheck(), sc_format), sc_out);
    } else if (cache->parsed()) {
      if (cache_clear_cmd->parsed()) {
        std::cout << "removed " << vem::cache_clear(cache_dir) << " files\n";
      } else if (cache_verify_cmd->parsed()) {
        auto entries = vem::cache_verify(cache_dir);
        int bad = 0;
        for (const auto& e : entries) {
          std::cout << e.key << (e.valid ? " ok" : " INVALID " + e.detail) << "\n";
          if (!e.valid) ++bad;
        }
        std::cout << entries.size() << " entries, " << bad << " invalid\n";
        if (bad > 0) return 3;
      } else if (cache_list_cmd->parsed()) {
        for (const auto& e : vem::cache_list(cache_dir)) std::cout << e.key << "\n";
      }
    }
  } catch (const vem::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const vem::InvalidGeometry& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
