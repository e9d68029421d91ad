// Copyright 2025 The PolyPlan Authors
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

#include "polyplan/polyplan.h"

#include <cstring>
#include <new>
#include <string>

#include "bench.hpp"
#include "geometry.hpp"
#include "json_io.hpp"
#include "sdcore.hpp"
#include "svg.hpp"
#include "trajopt.hpp"

struct pp_polytope {
  polyplan::ConvexPolytope body;
};

namespace {

thread_local std::string g_last_error = "";

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

pp_status fail(pp_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `fn`, translating C++ exceptions into status codes.
template <typename Fn>
pp_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const polyplan::ParseError& e) {
    return fail(PP_ERR_PARSE, e.what());
  } catch (const polyplan::DimensionError& e) {
    return fail(PP_ERR_DIMENSION, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(PP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PP_ERR_INTERNAL, e.what());
  }
}

polyplan::MCPOptions options_from_json(const char* options_json,
                                       polyplan::TrajectoryProblem* prob) {
  polyplan::MCPOptions opts;
  if (!options_json || !*options_json) return opts;
  const polyplan::Json j = polyplan::parse_json(options_json);
  if (!j.is_object()) throw polyplan::ParseError("options must be an object");
  if (j.contains("formulation") && prob) {
    const auto f = polyplan::formulation_from_string(
        j["formulation"].get<std::string>());
    if (!f) throw polyplan::ParseError("unknown formulation tag");
    prob->formulation = *f;
  }
  if (j.contains("seed")) opts.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("tol")) opts.tol = j["tol"].get<double>();
  if (j.contains("max_iter")) opts.max_iter = j["max_iter"].get<int>();
  if (j.contains("restarts")) opts.restarts = j["restarts"].get<int>();
  return opts;
}

}  // namespace

extern "C" {

const char* pp_status_name(pp_status status) {
  switch (status) {
    case PP_OK:
      return "ok";
    case PP_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case PP_ERR_PARSE:
      return "parse_error";
    case PP_ERR_DIMENSION:
      return "dimension_mismatch";
    case PP_ERR_SOLVER:
      return "solver_failure";
    case PP_ERR_IO:
      return "io_error";
    case PP_ERR_INTERNAL:
      return "internal_error";
  }
  return "unknown";
}

const char* pp_last_error(void) { return g_last_error.c_str(); }

const char* pp_version(void) { return "0.1.0"; }

pp_status pp_polytope_create(int dim, int faces, const double* A,
                             const double* b, const double* c,
                             pp_polytope** out) {
  if (!A || !b || !c || !out)
    return fail(PP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    polyplan::Matrix Am(faces, dim);
    for (int i = 0; i < faces; ++i)
      for (int j = 0; j < dim; ++j) Am(i, j) = A[i * dim + j];
    polyplan::Vector bv = Eigen::Map<const polyplan::Vector>(b, faces);
    polyplan::Vector cv = Eigen::Map<const polyplan::Vector>(c, dim);
    *out = new pp_polytope{polyplan::ConvexPolytope(Am, bv, cv)};
    return PP_OK;
  });
}

pp_status pp_polytope_from_json(const char* json, pp_polytope** out) {
  if (!json || !out) return fail(PP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    auto bodies = polyplan::polytopes_from_json(polyplan::parse_json(json));
    if (bodies.size() != 1)
      return fail(PP_ERR_INVALID_ARGUMENT,
                  "document expands to more than one body");
    *out = new pp_polytope{std::move(bodies.front())};
    return PP_OK;
  });
}

pp_status pp_polytope_to_json(const pp_polytope* poly, char** json) {
  if (!poly || !json) return fail(PP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    *json = dup_string(polyplan::polytope_to_json(poly->body).dump());
    return PP_OK;
  });
}

int pp_polytope_dim(const pp_polytope* poly) {
  return poly ? poly->body.dim() : 0;
}

int pp_polytope_faces(const pp_polytope* poly) {
  return poly ? poly->body.num_faces() : 0;
}

pp_status pp_polytope_transform(const pp_polytope* poly,
                                const double* translation,
                                const double* rotation, pp_polytope** out) {
  if (!poly || !translation || !rotation || !out)
    return fail(PP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    const int d = poly->body.dim();
    polyplan::Matrix R(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) R(i, j) = rotation[i * d + j];
    const polyplan::Vector l =
        Eigen::Map<const polyplan::Vector>(translation, d);
    *out = new pp_polytope{polyplan::transform_polytope(
        poly->body, polyplan::RigidTransform(l, R))};
    return PP_OK;
  });
}

pp_status pp_polytope_vertices(const pp_polytope* poly, double** data,
                               int* count) {
  if (!poly || !data || !count)
    return fail(PP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    const auto verts = poly->body.vertices();
    const int d = poly->body.dim();
    double* buf = new double[verts.size() * d];
    for (size_t i = 0; i < verts.size(); ++i)
      for (int j = 0; j < d; ++j) buf[i * d + j] = verts[i](j);
    *data = buf;
    *count = static_cast<int>(verts.size());
    return PP_OK;
  });
}

void pp_polytope_free(pp_polytope* poly) { delete poly; }

pp_status pp_signed_distance(const pp_polytope* ego,
                             const pp_polytope* obstacle, double* sd) {
  if (!ego || !obstacle || !sd)
    return fail(PP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    *sd = polyplan::signed_distance(ego->body, obstacle->body);
    return PP_OK;
  });
}

pp_status pp_signed_distance_oracle(const pp_polytope* ego,
                                    const pp_polytope* obstacle, double tol,
                                    double* sd) {
  if (!ego || !obstacle || !sd)
    return fail(PP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    *sd = polyplan::signed_distance_oracle(ego->body, obstacle->body, tol);
    return PP_OK;
  });
}

pp_status pp_assignments_json(const pp_polytope* ego,
                              const pp_polytope* obstacle, char** json) {
  if (!ego || !obstacle || !json)
    return fail(PP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    *json = dup_string(polyplan::dump_assignments_json(
        polyplan::build_sdlp(ego->body, obstacle->body)));
    return PP_OK;
  });
}

pp_status pp_solve_json(const char* problem_json, const char* options_json,
                        char** trajectory_json) {
  if (!problem_json || !trajectory_json)
    return fail(PP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    polyplan::TrajectoryProblem prob =
        polyplan::problem_from_json_any(polyplan::parse_json(problem_json));
    const polyplan::MCPOptions opts = options_from_json(options_json, &prob);
    const polyplan::SolveReport report = polyplan::solve_problem(prob, opts);
    *trajectory_json =
        dup_string(polyplan::solve_report_to_json(report).dump(2));
    const bool converged =
        report.solution.status == polyplan::MCPStatus::kConverged;
    if (!converged || !report.certified)
      return fail(PP_ERR_SOLVER,
                  std::string("solve failed: status=") +
                      polyplan::to_string(report.solution.status) +
                      (report.certified ? "" : ", collision check failed") +
                      (report.solution.diagnostic.empty()
                           ? ""
                           : "; " + report.solution.diagnostic));
    return PP_OK;
  });
}

pp_status pp_bench_json(const char* spec_json, const char* out_dir,
                        char** summary_json) {
  if (!spec_json) return fail(PP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    const polyplan::BenchmarkSpec spec =
        polyplan::bench_spec_from_json(polyplan::parse_json(spec_json));
    const polyplan::BenchResult result = polyplan::run_benchmark(spec);
    polyplan::Json summary;
    if (out_dir && *out_dir) {
      try {
        summary = polyplan::write_bench_outputs(spec, result, out_dir);
      } catch (const std::runtime_error& e) {
        return fail(PP_ERR_IO, e.what());
      }
    } else {
      summary = polyplan::summary_to_json(spec, result);
    }
    summary["table"] = polyplan::format_table(result);
    if (summary_json) *summary_json = dup_string(summary.dump(2));
    return PP_OK;
  });
}

pp_status pp_render_svg(const char* trajectory_json, char** svg) {
  if (!trajectory_json || !svg)
    return fail(PP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    const polyplan::SolveReport report = polyplan::solve_report_from_json(
        polyplan::parse_json(trajectory_json));
    *svg = dup_string(polyplan::render_svg(report));
    return PP_OK;
  });
}

void pp_string_free(char* s) { delete[] s; }
void pp_buffer_free(double* p) { delete[] p; }

}  // extern "C"
