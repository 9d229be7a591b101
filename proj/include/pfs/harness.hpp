#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pfs/boundary.hpp"
#include "pfs/geometry.hpp"
#include "pfs/model.hpp"
#include "pfs/stepper.hpp"

namespace pfs {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InitialPiece {
  double from = 0.0;
  double to = 0.0;
  enum class Kind { area, depth, level } kind = Kind::depth;
  double value = 0.0;
  double Q = 0.0;
};

struct InitialCondition {
  // still: water at rest with a flat piezometric level (altitude, m).
  // head: constant total head (m) with uniform discharge Q.
  // pieces: piecewise constant data, dry elsewhere.
  enum class Kind { still, head, pieces, dry } kind = Kind::dry;
  double value = 0.0;
  double Q = 0.0;
  std::vector<InitialPiece> pieces;
};

struct ScenarioConfig {
  std::string name = "scenario";
  double upstream_altitude = 0.0;
  std::vector<SegmentSpec> segments;
  ModelParams model;
  double cfl = 0.9;
  TransitionMethod method = TransitionMethod::fka;
  double end_time = 1.0;
  double output_interval = 1.0;
  InitialCondition initial;
  BoundaryCondition upstream;
  BoundaryCondition downstream;
  std::vector<double> probes;  // positions sampled every step
};

// Head tables in the config are in metres; BoundaryCondition stores Phi = g * head.
ScenarioConfig parse_config(const std::string& yaml_text, const std::string& base_dir = ".");
ScenarioConfig load_config(const std::string& path);

std::vector<std::string> builtin_names();
std::string builtin_path(const std::string& name);
ScenarioConfig builtin_scenario(const std::string& name);

// Multiplies every segment's cell count by `factor` (rounded, at least 1).
ScenarioConfig refined(ScenarioConfig cfg, double factor);

std::vector<CellState> initial_cells(const ScenarioConfig& cfg, const PipeGeometry& geo);

// Free surface: Z + H(A); pressurized: Z + R + c^2 (A - S) / (g S); dry: Z - R.
double piezometric_head(const CellGeometry& geo, const ModelParams& p, double A, int E);
// piezo minus the invert altitude: depth, or pressure head over the invert.
double water_height(const CellGeometry& geo, const ModelParams& p, double A, int E);

struct FieldRecord {
  double t, x, A, Q;
  int E;
  double u, h, piezo, head, entropy;
};

FieldRecord make_record(double t, const CellGeometry& geo, const ModelParams& p, const CellState& s,
                        double Zdyn);

struct ProbeSample {
  double t;
  std::size_t probe;
  double A, Q;
  int E;
  double piezo;
};

struct RunOutput {
  std::vector<FieldRecord> fields;
  std::vector<StepDiagnostics> diagnostics;
  std::vector<TransitionEvent> events;
  std::vector<ProbeSample> probes;
  MeshState final_state;
  double initial_mass = 0.0;
  bool aborted = false;
  std::string abort_message;
};

struct RunOptions {
  std::optional<TransitionMethod> method;
  bool keep_fields = true;
  // Called after every step; returning false stops the run.
  std::function<bool(const MeshState&, const StepDiagnostics&)> observer;
};

RunOutput run_scenario(const ScenarioConfig& cfg, const RunOptions& opt = {});

void write_fields_csv(std::ostream& os, const std::vector<FieldRecord>& rows);
void write_diagnostics_csv(std::ostream& os, const std::vector<StepDiagnostics>& rows);
void write_events_csv(std::ostream& os, const std::vector<TransitionEvent>& rows);
void write_probes_csv(std::ostream& os, const std::vector<ProbeSample>& rows,
                      const std::vector<double>& positions);
std::vector<FieldRecord> read_fields_csv(std::istream& is);

// A field sampled on a uniform mesh of `values.size()` cells over [0, length].
struct MeshField {
  double length = 1.0;
  std::vector<double> values;
  double dx() const { return length / double(values.size()); }
};

struct OrderFit {
  std::vector<double> dx;
  std::vector<double> errors;
  double order = 0.0;
};

// Cell-average projection of `fine` onto a mesh of n cells; n must divide the fine count.
std::vector<double> project_average(const MeshField& fine, std::size_t n);
double l2_error(const MeshField& coarse, const MeshField& reference);
// Least-squares slope of log e against log dx over at least three levels.
OrderFit l2_error_and_order(const std::vector<MeshField>& levels, const MeshField& reference);

// Adaptive Gauss-Kronrod integral of xi^order * f(xi) over [lo, hi].
double quadrature_moment(const std::function<double(double)>& f, double lo, double hi, int order);

}  // namespace pfs
