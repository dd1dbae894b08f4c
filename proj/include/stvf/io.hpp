// Output formats: indicator CSV, legacy VTK snapshots, run summaries.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stvf/config.hpp"
#include "stvf/driver.hpp"
#include "stvf/estimators.hpp"
#include "stvf/mesh.hpp"

namespace stvf {

inline constexpr const char* kCsvHeader =
    "path_id,n,t_n,tau_n,ndof,eta_time1,eta_time2,eta_space1,eta_space2,eta_noise1,"
    "eta_noise2,eta_noise3,eta_lin,fp_iters";

struct CsvRow {
  int path_id = 0;
  IndicatorRecord record;  // eta_T is not part of the CSV
};

// Header plus one row per record, ordered by (path, n); 17 significant digits.
void write_csv(std::ostream& out, const std::vector<PathLog>& logs);
void write_csv(const std::string& path, const std::vector<PathLog>& logs);

// Throws std::runtime_error on a wrong header or a malformed row.
std::vector<CsvRow> read_csv(std::istream& in);
std::vector<CsvRow> read_csv(const std::string& path);

// VTK legacy ASCII unstructured grid: triangles (cell type 5), the
// solution as point data and eta_T as cell data when given.
void write_vtk(std::ostream& out, const Mesh& mesh, const FeFunction& solution,
               const std::vector<double>& eta_T);
void write_vtk(const std::string& path, const Mesh& mesh, const FeFunction& solution,
               const std::vector<double>& eta_T);

std::string summary_json(const RunConfig& config, const McResult& result);

}  // namespace stvf
