#include "supergeo/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "supergeo/errors.hpp"
#include "supergeo/intersection.hpp"
#include "supergeo/modeljson.hpp"
#include "supergeo/orientation.hpp"
#include "supergeo/pigrass.hpp"
#include "supergeo/registry.hpp"

namespace supergeo {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << text;
  if (!out) fail(ErrorKind::Io, "cannot write '" + out_path + "'");
}

int spec_int(const std::string& text, const std::string& ref) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::Usage, "bad integer '" + text + "' in model spec '" + ref + "'");
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) return parts;
    start = pos + 1;
  }
}

// Tolerances come from an optional job-file object, with CLI flags taking
// precedence; densities below come from the caller when neither speaks up.
struct TolOverrides {
  double newton = 0;  // 0 means unset
  double sign = 0;
  int density = 0;
};

ToleranceSet tolerances_for(const Json* job_tols, const TolOverrides& cli, int default_density) {
  ToleranceSet tols;
  tols.grid_density = default_density;
  if (job_tols) {
    if (!job_tols->is_object()) {
      fail(ErrorKind::Parse, "schema violation at /tolerances: expected an object");
    }
    if (job_tols->contains("newton_tol")) tols.newton_tol = (*job_tols)["newton_tol"].get<double>();
    if (job_tols->contains("sign_tol")) tols.sign_tol = (*job_tols)["sign_tol"].get<double>();
    if (job_tols->contains("grid_density")) {
      tols.grid_density = (*job_tols)["grid_density"].get<int>();
    }
  }
  if (cli.newton > 0) tols.newton_tol = cli.newton;
  if (cli.sign > 0) tols.sign_tol = cli.sign;
  if (cli.density > 0) tols.grid_density = cli.density;
  if (tols.newton_tol <= 0 || tols.sign_tol <= 0) {
    fail(ErrorKind::Validation, "tolerances must be positive");
  }
  if (tols.grid_density < 2) fail(ErrorKind::Validation, "grid density must be at least 2");
  return tols;
}

// Largest per-dimension density whose full grid stays near 4096 seeds per
// chart, so high-dimensional charts do not blow the budget.
int auto_density(int even_dim) {
  if (even_dim <= 1) return 64;
  const int d = static_cast<int>(std::pow(4096.0, 1.0 / even_dim) + 1e-9);
  return std::max(2, std::min(64, d));
}

SuperManifoldModel model_from_ref_or_object(const Json& j, const std::string& ptr) {
  if (j.is_string()) return resolve_model(j.get<std::string>());
  if (j.is_object()) return model_from_json(j);
  fail(ErrorKind::Parse, "schema violation at " + ptr + ": expected a model name or object");
}

void check_thread_cap() {
  const char* raw = std::getenv("SUPERGEO_THREADS");
  if (!raw) return;
  const std::string text(raw);
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size() || v < 1) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    fail(ErrorKind::Usage, "SUPERGEO_THREADS must be a positive integer, got '" + text + "'");
  }
  // Everything in this build runs on one thread, which satisfies any cap.
}

}  // namespace

SuperManifoldModel resolve_model(const std::string& ref) {
  const std::string pi_prefix = "pi-grassmannian:";
  const std::string gr_prefix = "grassmannian:";
  if (ref.rfind(pi_prefix, 0) == 0) {
    const auto parts = split(ref.substr(pi_prefix.size()), ',');
    if (parts.size() != 2) {
      fail(ErrorKind::Usage, "expected pi-grassmannian:k,m, got '" + ref + "'");
    }
    return build_pi_grassmannian(spec_int(parts[0], ref), spec_int(parts[1], ref));
  }
  if (ref.rfind(gr_prefix, 0) == 0) {
    const auto parts = split(ref.substr(gr_prefix.size()), ',');
    const auto rows = parts.size() == 2 ? split(parts[0], '|') : std::vector<std::string>{};
    const auto cols = parts.size() == 2 ? split(parts[1], '|') : std::vector<std::string>{};
    if (rows.size() != 2 || cols.size() != 2) {
      fail(ErrorKind::Usage, "expected grassmannian:k|l,m|n, got '" + ref + "'");
    }
    return build_supergrassmannian(spec_int(rows[0], ref), spec_int(rows[1], ref),
                                   spec_int(cols[0], ref), spec_int(cols[1], ref));
  }
  if (ref.find('/') != std::string::npos ||
      (ref.size() > 5 && ref.compare(ref.size() - 5, 5, ".json") == 0)) {
    return model_from_json(parse_json(read_file(ref), ref));
  }
  return registry_model(ref);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"computational supergeometry toolkit"};
  app.require_subcommand(1);

  std::string model_ref, job_path, out_path, emit_path;
  double tol = 1e-9;
  TolOverrides tol_flags;
  int gk = 0, gl = 0, gm = 0, gn = 0;
  bool pi_flag = false;

  CLI::App* cmd_registry = app.add_subcommand("registry", "list built-in model names");
  cmd_registry->add_option("--out", out_path, "write the report here instead of stdout");

  CLI::App* cmd_validate = app.add_subcommand("validate", "run gluing checks on a model");
  cmd_validate->add_option("--model", model_ref, "model name, generator spec, or JSON path")
      ->required();
  cmd_validate->add_option("--tol", tol, "residual tolerance");
  cmd_validate->add_option("--out", out_path, "write the report here instead of stdout");

  CLI::App* cmd_classify = app.add_subcommand("classify", "orientability via the orienting cover");
  cmd_classify->add_option("--model", model_ref, "model name, generator spec, or JSON path")
      ->required();
  cmd_classify->add_option("--tol", tol, "sign degeneracy tolerance");
  cmd_classify->add_option("--out", out_path, "write the report here instead of stdout");

  CLI::App* cmd_intersect =
      app.add_subcommand("intersect", "oriented intersection pair for a morphism job");
  cmd_intersect->add_option("--job", job_path, "job JSON: {morphism, submanifold, tolerances?}")
      ->required();
  cmd_intersect->add_option("--newton-tol", tol_flags.newton, "Newton convergence tolerance");
  cmd_intersect->add_option("--sign-tol", tol_flags.sign, "determinant degeneracy tolerance");
  cmd_intersect->add_option("--grid-density", tol_flags.density, "seeds per dimension");
  cmd_intersect->add_option("--out", out_path, "write the report here instead of stdout");

  CLI::App* cmd_euler = app.add_subcommand("euler", "Euler characteristic pair of a pi model");
  cmd_euler->add_option("--model", model_ref, "model ref; uses the standard Morse field");
  cmd_euler->add_option("--job", job_path, "job JSON: {model, vector_field, tolerances?}");
  cmd_euler->add_option("--newton-tol", tol_flags.newton, "Newton convergence tolerance");
  cmd_euler->add_option("--sign-tol", tol_flags.sign, "determinant degeneracy tolerance");
  cmd_euler->add_option("--grid-density", tol_flags.density, "seeds per dimension");
  cmd_euler->add_option("--out", out_path, "write the report here instead of stdout");

  CLI::App* cmd_grass = app.add_subcommand("grassmannian", "generate a Grassmannian atlas");
  cmd_grass->add_option("--k", gk, "even rows")->required();
  cmd_grass->add_option("--l", gl, "odd rows (ignored with --pi)");
  cmd_grass->add_option("--m", gm, "even columns")->required();
  cmd_grass->add_option("--n", gn, "odd columns (ignored with --pi)");
  cmd_grass->add_flag("--pi", pi_flag, "build the pi-symmetric variant");
  cmd_grass->add_option("--emit", emit_path, "write the model JSON here");
  cmd_grass->add_option("--out", out_path, "write the model JSON here (alias of --emit)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
    std::cout << dump_json(Json{{"context", e.what()}, {"error", "usage"}}) << "\n";
    return 2;
  }

  int status = 0;
  try {
    check_thread_cap();
    Json result;
    if (cmd_registry->parsed()) {
      result["models"] = registry_names();
    } else if (cmd_validate->parsed()) {
      const SuperManifoldModel model = resolve_model(model_ref);
      const ValidationReport rep = validate_model(model, tol);
      result = validation_to_json(rep);
      if (!rep.passed) status = 1;
    } else if (cmd_classify->parsed()) {
      const SuperManifoldModel model = resolve_model(model_ref);
      result = classification_to_json(model.name, classify(model, tol));
    } else if (cmd_intersect->parsed()) {
      const Json job = parse_json(read_file(job_path), job_path);
      if (!job.is_object() || !job.contains("morphism") || !job.contains("submanifold")) {
        fail(ErrorKind::Parse, "schema violation at /: expected {morphism, submanifold}");
      }
      const MorphismModel f = morphism_from_json(job["morphism"], resolve_model);
      const SubmanifoldModel z = submanifold_from_json(job["submanifold"], resolve_model);
      const Json* tj = job.contains("tolerances") ? &job["tolerances"] : nullptr;
      result = report_to_json(intersection_pair(f, z, tolerances_for(tj, tol_flags, 64)));
    } else if (cmd_euler->parsed()) {
      if (model_ref.empty() == job_path.empty()) {
        fail(ErrorKind::Usage, "euler needs exactly one of --model or --job");
      }
      SuperManifoldModel model;
      VectorField field;
      const Json* tj = nullptr;
      Json job;
      if (!job_path.empty()) {
        job = parse_json(read_file(job_path), job_path);
        if (!job.is_object() || !job.contains("model") || !job.contains("vector_field")) {
          fail(ErrorKind::Parse, "schema violation at /: expected {model, vector_field}");
        }
        model = model_from_ref_or_object(job["model"], "/model");
        field = vector_field_from_json(job["vector_field"], model);
        if (job.contains("tolerances")) tj = &job["tolerances"];
      } else {
        model = resolve_model(model_ref);
        std::vector<double> constants(model.charts.size());
        for (std::size_t i = 0; i < constants.size(); ++i) constants[i] = static_cast<double>(i);
        field = standard_morse_field(model, constants);
      }
      const ToleranceSet tols = tolerances_for(tj, tol_flags, auto_density(model.even_dim));
      const auto chi = euler_pair_pi(model, field, tols);
      result["model"] = model.name;
      result["euler_pair"] = Json::array({chi.first, chi.second});
    } else if (cmd_grass->parsed()) {
      const SuperManifoldModel model =
          pi_flag ? build_pi_grassmannian(gk, gm) : build_supergrassmannian(gk, gl, gm, gn);
      result = model_to_json(model);
      if (out_path.empty()) out_path = emit_path;
    }
    write_output(dump_json(result) + "\n", out_path);
  } catch (const Error& e) {
    std::cout << dump_json(Json{{"context", e.what()}, {"error", error_kind_name(e.kind())}})
              << "\n";
    return e.kind() == ErrorKind::Usage || e.kind() == ErrorKind::Io ? 2 : 1;
  } catch (const std::exception& e) {
    std::cout << dump_json(Json{{"context", e.what()}, {"error", "internal"}}) << "\n";
    return 1;
  }
  return status;
}

}  // namespace supergeo
