/* Copyright 2025 The PolyPlan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the polyplan shared library: exact signed distances between
 * convex polytopes via assignment enumeration, trajectory optimization with
 * signed-distance constraint slots or separating hyperplanes, an MCP-based
 * solver, and the randomized benchmark harness.
 *
 * All objects are opaque handles; every fallible call returns a pp_status and
 * stores a human-readable message retrievable with pp_last_error (per
 * thread). Strings returned through char** are heap-allocated and must be
 * released with pp_string_free.
 */

#ifndef POLYPLAN_POLYPLAN_H_
#define POLYPLAN_POLYPLAN_H_

#include <stdint.h>

#if defined _WIN32
#define PP_API __declspec(dllexport)
#else
#define PP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pp_status {
  PP_OK = 0,
  PP_ERR_INVALID_ARGUMENT = 1,
  PP_ERR_PARSE = 2,
  PP_ERR_DIMENSION = 3,
  PP_ERR_SOLVER = 4,
  PP_ERR_IO = 5,
  PP_ERR_INTERNAL = 6,
} pp_status;

PP_API const char* pp_status_name(pp_status status);

/* Message describing the most recent failure on this thread; never NULL. */
PP_API const char* pp_last_error(void);

PP_API const char* pp_version(void);

/* --- Polytopes ---------------------------------------------------------- */

typedef struct pp_polytope pp_polytope;

/* Creates a polytope { p : A p + b >= 0 } with inward normals, interior
 * point c, `faces` rows and spatial dimension `dim` (2 or 3). A is row-major
 * faces x dim. */
PP_API pp_status pp_polytope_create(int dim, int faces, const double* A,
                                    const double* b, const double* c,
                                    pp_polytope** out);

/* Parses {"A": ..., "b": ..., "c": ...} or a shape shorthand such as
 * {"shape": "rectangle", "w": 1.0, "h": 0.5}. Shorthands that expand to
 * several bodies (L_shape) are rejected here; pass those inside problem
 * documents instead. */
PP_API pp_status pp_polytope_from_json(const char* json, pp_polytope** out);
PP_API pp_status pp_polytope_to_json(const pp_polytope* poly, char** json);

PP_API int pp_polytope_dim(const pp_polytope* poly);
PP_API int pp_polytope_faces(const pp_polytope* poly);

/* Rigid image of the polytope: rotation is row-major dim x dim. */
PP_API pp_status pp_polytope_transform(const pp_polytope* poly,
                                       const double* translation,
                                       const double* rotation,
                                       pp_polytope** out);

/* Vertices as a row-major count x dim buffer; release with pp_buffer_free. */
PP_API pp_status pp_polytope_vertices(const pp_polytope* poly, double** data,
                                      int* count);

PP_API void pp_polytope_free(pp_polytope* poly);

/* --- Signed distance ---------------------------------------------------- */

/* Assignment-enumeration signed distance (negative: overlap, zero: touching,
 * positive: separated). */
PP_API pp_status pp_signed_distance(const pp_polytope* ego,
                                    const pp_polytope* obstacle, double* sd);

/* Independent bisection oracle, accurate to tol. */
PP_API pp_status pp_signed_distance_oracle(const pp_polytope* ego,
                                           const pp_polytope* obstacle,
                                           double tol, double* sd);

/* Debug dump of every assignment point of the pair's LP as JSON. */
PP_API pp_status pp_assignments_json(const pp_polytope* ego,
                                     const pp_polytope* obstacle, char** json);

/* --- Solving and benchmarking ------------------------------------------- */

/* Solves a trajectory problem document (or {"generate": {...}} benchmark
 * shorthand). options_json may be NULL or an object with any of
 * {"formulation", "seed", "tol", "max_iter", "restarts"}. On success
 * *trajectory_json holds the full trajectory document. Returns
 * PP_ERR_SOLVER when the solver fails to converge or the trajectory fails
 * the independent collision check; *trajectory_json is still written then
 * so the failure can be inspected. */
PP_API pp_status pp_solve_json(const char* problem_json,
                               const char* options_json,
                               char** trajectory_json);

/* Runs a benchmark spec document. When out_dir is non-NULL, writes one
 * record CSV per formulation ({problem}-{formulation}-{seed}.csv; fixed-seed
 * reruns are byte-identical) plus summary.json. *summary_json receives the
 * summary document. */
PP_API pp_status pp_bench_json(const char* spec_json, const char* out_dir,
                               char** summary_json);

/* Renders a trajectory document to a standalone SVG. */
PP_API pp_status pp_render_svg(const char* trajectory_json, char** svg);

PP_API void pp_string_free(char* s);
PP_API void pp_buffer_free(double* p);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* POLYPLAN_POLYPLAN_H_ */
