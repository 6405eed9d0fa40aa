#pragma once

// Discrete Dirichlet traces g_l on the Dirichlet polyline and the Dirichlet
// data oscillations osc_D(E)^2 = |E| ||(g - g_l)'||^2_E.

#include <span>
#include <string>
#include <vector>

#include "afem/mesh.hpp"
#include "afem/problem.hpp"
#include "afem/quadrature.hpp"

namespace afem {

enum class DirichletMethod { nodal, l2_projection, scott_zhang };

const char* to_string(DirichletMethod m);
/// Accepts "nodal", "l2" and "sz".
DirichletMethod parse_dirichlet_method(const std::string& s);

struct DirichletTrace {
  DirichletMethod method = DirichletMethod::nodal;
  std::vector<int> vertices;  // ascending Dirichlet vertex ids
  std::vector<double> values;
  std::vector<int> edges;     // ascending Dirichlet edge ids

  /// Value at a Dirichlet vertex. Throws ContractError for other vertices.
  double value(int vertex) const;
  /// (g_l(b) - g_l(a)) / |E| along the stored orientation of edge e.
  double slope(const Mesh& mesh, int e) const;
};

/// For each Dirichlet vertex z, the Dirichlet edge E_z carrying its dual basis
/// function: the incident Dirichlet edge with the smaller id. Since refinement
/// keeps the ids of surviving edges, an unchanged neighbourhood of z keeps E_z.
struct EdgeChoiceMap {
  std::vector<int> vertices;  // ascending
  std::vector<int> edge;

  int choice(int vertex) const;
};

EdgeChoiceMap edge_choice(const Mesh& mesh);

DirichletTrace discretize_trace(const Mesh& mesh, const ProblemSpec& prob, DirichletMethod method,
                                const QuadratureOptions& quad = {});

/// Same, for an arbitrary trace function (used by projection tests).
DirichletTrace discretize_trace(const Mesh& mesh, const ScalarField& g, DirichletMethod method,
                                const QuadratureOptions& quad = {},
                                std::span<const RadialSingularity> singularities = {});

/// osc_D(E)^2 for every edge id; zero off Γ_D.
std::vector<double> osc_dirichlet(const Mesh& mesh, const ProblemSpec& prob, const DirichletTrace& trace,
                                  const QuadratureOptions& quad = {});

/// Scott-Zhang value at vertex z: <ψ_z, g>_{E_z} with the P1 dual basis on E_z.
double scott_zhang_value(const Mesh& mesh, const ScalarField& g, int z, int edge, const SegmentRule& rule,
                         std::span<const RadialSingularity> singularities = {});

/// Samples of g' on one edge, with the edge quadrature weights.
struct EdgeDerivativeSamples {
  double length = 0.0;
  std::vector<double> weights;
  std::vector<double> dg;
};

EdgeDerivativeSamples sample_edge_derivative(const Mesh& mesh, const ProblemSpec& prob, int e,
                                             const QuadratureOptions& quad = {});

/// | ||(g - g_l)'||^2 + ||(g_l - ĝ_l)'||^2 - ||(g - ĝ_l)'||^2 | on one edge for the
/// nodal slope and an alternative discrete slope. Throws ContractError when
/// `trace_method` is not nodal.
double check_pythagoras(const EdgeDerivativeSamples& samples, double nodal_slope, double alt_slope,
                        DirichletMethod trace_method = DirichletMethod::nodal);

/// Dirichlet vertices of the coarse mesh whose neighbourhood is unchanged in the
/// fine mesh but whose Scott-Zhang values differ. Throws ContractError when the
/// edge choices do not follow the persistence rule.
std::vector<int> scott_zhang_locality_check(const Mesh& coarse, const Mesh& fine, const EdgeChoiceMap& choice_coarse,
                                            const EdgeChoiceMap& choice_fine, const ScalarField& v,
                                            const QuadratureOptions& quad = {});

}  // namespace afem
