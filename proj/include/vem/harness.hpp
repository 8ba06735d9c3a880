#ifndef VEM_HARNESS_HPP
#define VEM_HARNESS_HPP

#include <string>
#include <vector>

#include "vem/spectra.hpp"
#include "vem/vemspace.hpp"

namespace vem {

enum class StabChoice { projection, dofi, both };

struct ExperimentConfig {
  // Element source: builtin family + index, or a JSON polygon file.
  std::string family = "hanging_node";  // "hanging_node" | "flatten"
  int index = 1;                        // 1..5
  std::string element_json;             // overrides family/index when set

  int p = 3;
  int p_max = -1;  // < 0: single degree; else sweep p..p_max
  StabChoice stab = StabChoice::both;
  BoundaryTerm bterm = BoundaryTerm::dofsum;

  int refine = -1;              // fixed FEM level; -1 enables auto refinement
  double auto_refine_tol = 0.005;
  int max_refine = 6;
  int quad_safety = 0;          // extra quadrature degree on data integrals

  std::string format = "csv";   // "csv" | "markdown"
  std::string out;              // output path; empty writes to stdout
  std::string cache_dir;        // empty disables the stiffness cache
  int jobs = 1;

  void validate() const;  // throws InvalidArgument
};

struct TableRow {
  std::string element_id;
  int p = 0;
  std::string stab;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double cond_A = 0.0;
  double cond_B = 0.0;
  double rho_star = 0.0;
  int fem_refine_used = 0;
  bool refine_capped = false;
  double wall_time = 0.0;
};

std::vector<TableRow> run_pspan(const ExperimentConfig& config);
std::vector<TableRow> run_sequence(const ExperimentConfig& config);

struct RateReport {
  std::vector<double> h;
  std::vector<double> h1_error;
  std::vector<double> l2_error;
  double h1_slope = 0.0, l2_slope = 0.0;
  double h1_r2 = 0.0, l2_r2 = 0.0;
};

/// Interpolation rate study on a similarity-shrinking element sequence.
RateReport run_interp_rates(const ExperimentConfig& config);

/// Taylor-Hood convergence on a manufactured solution (unit square).
RateReport run_fem_selfcheck();

/// Exact-basis stiffness with FEM auto-refinement; returns the matrix and the
/// level used. Cached on disk when cache_dir is set.
struct StiffnessResult {
  Eigen::MatrixXd B;
  int level = 0;
  bool capped = false;
};
StiffnessResult exact_stiffness_refined(const Polygon& poly, const DofLayout& layout,
                                        const Eigen::MatrixXd& A,
                                        const Eigen::MatrixXd& kernel,
                                        const ExperimentConfig& config);

struct CacheEntry {
  std::string key;
  std::string path;
  bool valid = false;
  std::string detail;
};
std::vector<CacheEntry> cache_list(const std::string& dir);
int cache_clear(const std::string& dir);
std::vector<CacheEntry> cache_verify(const std::string& dir);

std::string emit_table(const std::vector<TableRow>& rows, const std::string& format);
std::string emit_rates(const RateReport& report, const std::string& format);

/// Least-squares slope of log(y) vs log(x) with R^2.
std::pair<double, double> loglog_slope(const std::vector<double>& x,
                                       const std::vector<double>& y);

Polygon element_from_config(const ExperimentConfig& config);
Polygon element_from_config(const ExperimentConfig& config, int index);

}  // namespace vem

#endif
