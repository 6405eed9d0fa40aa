#pragma once

// Residual error estimators and data oscillations. All values are squared.

#include <iosfwd>
#include <vector>

#include "afem/dirichlet.hpp"
#include "afem/fem.hpp"
#include "afem/mesh.hpp"
#include "afem/problem.hpp"

namespace afem {

struct EstimatorTotals {
  double rho = 0.0;         // sum of ρ(T)^2
  double varrho = 0.0;      // η_Ω^2 + η_N^2 + osc^2 + osc_D^2
  double varrho_ext = 0.0;  // extended estimator
  double eta_omega = 0.0;   // interior jump terms
  double eta_n = 0.0;       // Neumann residual terms
  double osc = 0.0;         // edge patch oscillations
  double osc_d = 0.0;
  double osc_n = 0.0;
  double osc_t = 0.0;
  double osc_k = 0.0;
  double res = 0.0;

  double eta() const { return eta_omega + eta_n; }
};

struct EstimatorReport {
  // per edge id
  std::vector<double> eta;         // |E| ||[∂_n U]||^2 (interior), |E| ||φ - ∂_n U||^2 (Neumann)
  std::vector<double> osc;         // |ω_E| ||f - f_ω_E||^2 on interior edges
  std::vector<double> osc_d;       // Dirichlet edges
  std::vector<double> osc_n;       // Neumann edges
  std::vector<double> wosc;        // boundary edges: res(T_E)^2
  std::vector<double> varrho;      // ϱ(E)^2
  std::vector<double> varrho_ext;  // ϱ̃(E)^2
  // per triangle
  std::vector<double> res;    // |T| ||f||^2_T
  std::vector<double> osc_t;  // |T| ||f - f_T||^2_T
  std::vector<double> rho;    // ρ(T)^2
  // per vertex, zero on boundary vertices
  std::vector<double> osc_k;

  EstimatorTotals totals;
};

/// Everything at once, reusing one set of load samples.
EstimatorReport estimate(const Mesh& mesh, const ProblemSpec& prob, const DiscreteSolution& sol,
                         const VolumeSamples& load, const QuadratureOptions& quad = {});
EstimatorReport estimate(const Mesh& mesh, const ProblemSpec& prob, const DiscreteSolution& sol,
                         const QuadratureOptions& quad = {});

/// (∇U|T+ - ∇U|T-) · n_E for an interior edge.
double normal_jump(const Mesh& mesh, std::span<const double> u, int e);

std::vector<double> element_estimator(const Mesh& mesh, const ProblemSpec& prob, const DiscreteSolution& sol,
                                      const QuadratureOptions& quad = {});
std::vector<double> edge_estimator(const Mesh& mesh, const ProblemSpec& prob, const DiscreteSolution& sol,
                                   const QuadratureOptions& quad = {});
std::vector<double> extended_estimator(const Mesh& mesh, const ProblemSpec& prob, const DiscreteSolution& sol,
                                       const QuadratureOptions& quad = {});

struct Oscillations {
  std::vector<double> osc_t;  // per triangle
  std::vector<double> osc;    // per edge (interior only)
  std::vector<double> osc_k;  // per vertex (interior only)
  std::vector<double> osc_n;  // per edge (Neumann only)
};

Oscillations oscillations(const Mesh& mesh, const ProblemSpec& prob, const QuadratureOptions& quad = {});

/// Integral mean and squared deviation of the load over a set of triangles,
/// both with the element quadrature.
struct PatchMoments {
  double mean = 0.0;
  double sq_dev = 0.0;  // ||f - mean||^2
};

PatchMoments patch_moments(const VolumeSamples& load, std::span<const int> triangles);
/// ||f - c||^2 over the triangles.
double patch_sq_dev(const VolumeSamples& load, std::span<const int> triangles, double c);

struct EquivalenceReport {
  double max_violation_i = 0.0;    // max(sum_{T⊂ω_E} osc_T(T)^2 - osc(E)^2)
  double max_violation_iii = 0.0;  // max(||f - f_ω_E||_ω_E - ||f - f_ω_z||_ω_z)
  double scale = 0.0;              // max of the compared magnitudes
  std::size_t comparisons = 0;
  std::size_t violations = 0;      // above 1e-12 * scale
};

EquivalenceReport local_equivalence_check(const Mesh& mesh, const ProblemSpec& prob, const QuadratureOptions& quad = {});

/// One row per entity: level,kind,id,value with kind T (ρ(T)^2), E_int, E_D,
/// E_N (ϱ(E)^2) and K (osc_K(z)^2).
void write_entity_csv(std::ostream& os, const Mesh& mesh, const EstimatorReport& report, int level, bool header);

}  // namespace afem
