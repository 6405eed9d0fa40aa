#include <cmath>
#include <ostream>

#include "afem/errors.hpp"
#include "afem/run.hpp"

namespace afem {

namespace {

void write_optional(std::ostream& os, const std::optional<double>& v) {
  if (v) os << *v;
}

}  // namespace

std::vector<RateRow> fit_rates(std::span<const LoopRecord> records, std::size_t window) {
  std::vector<RateRow> rows;
  const Quantity qs[] = {Quantity::varrho, Quantity::eta_omega, Quantity::eta_n,
                         Quantity::osc, Quantity::osc_d, Quantity::error};
  for (Quantity q : qs) {
    RateRow row;
    row.quantity = q;
    row.window = std::min(window, records.size());
    try {
      row.slope = rate_fit(records, q, row.window);
      row.status = "ok";
    } catch (const FitError& e) {
      row.status = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

void write_levels_csv(std::ostream& os, const RunConfig& cfg, std::span<const LoopRecord> records) {
  const auto prec = os.precision(17);
  os << "# schema=1 problem=" << cfg.problem << " strategy=" << cfg.strategy << " dirichlet=" << cfg.dirichlet
     << " seed=" << cfg.seed << "; *_sq columns are squared totals, error_sq = ||grad(u - U)||^2\n";
  os << "level,n_elements,n_vertices,n_edges,n_marked,branch,varrho_sq,eta_omega_sq,eta_n_sq,osc_sq,osc_d_sq,"
        "osc_n_sq,osc_t_sq,osc_k_sq,rho_sq,varrho_ext_sq,error_sq,delta,sigma,closure_ratio,cg_iterations,"
        "cg_residual\n";
  for (const auto& r : records) {
    os << r.level << ',' << r.n_elements << ',' << r.n_vertices << ',' << r.n_edges << ',' << r.n_marked << ','
       << to_string(r.branch) << ',' << r.varrho << ',' << r.eta_omega << ',' << r.eta_n << ',' << r.osc << ','
       << r.osc_d << ',' << r.osc_n << ',' << r.osc_t << ',' << r.osc_k << ',' << r.rho << ',' << r.varrho_ext
       << ',';
    if (r.energy_error) os << *r.energy_error * *r.energy_error;
    os << ',';
    write_optional(os, r.delta);
    os << ',' << r.sigma << ',';
    write_optional(os, r.closure_ratio);
    os << ',' << r.cg_iterations << ',' << r.cg_residual << '\n';
  }
  os.precision(prec);
}

void write_rates_csv(std::ostream& os, const RunConfig& cfg, std::span<const RateRow> rates) {
  const auto prec = os.precision(17);
  os << "# schema=1 problem=" << cfg.problem << " strategy=" << cfg.strategy
     << "; slope of log(sqrt(quantity_sq)) against log(n_elements) over the last window levels\n";
  os << "quantity,slope,window,status\n";
  for (const auto& r : rates) {
    os << to_string(r.quantity) << ',';
    write_optional(os, r.slope);
    os << ',' << r.window << ',' << r.status << '\n';
  }
  os.precision(prec);
}

}  // namespace afem
