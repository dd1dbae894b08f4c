#include "stvf/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace stvf {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

void check_stream(const std::ostream& out, const std::string& path) {
  if (!out) throw std::runtime_error("write failed: " + path);
}

template <typename V>
V parse_field(const std::string& s, std::size_t line) {
  V v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error("csv line " + std::to_string(line) + ": bad field '" + s + "'");
  }
  return v;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<PathLog>& logs) {
  out << kCsvHeader << '\n';
  for (const auto& log : logs) {
    for (const auto& r : log.records) {
      out << log.path_id << ',' << r.n << ',' << fmt(r.t) << ',' << fmt(r.tau) << ',' << r.ndof
          << ',' << fmt(r.eta_time1) << ',' << fmt(r.eta_time2) << ',' << fmt(r.eta_space1)
          << ',' << fmt(r.eta_space2) << ',' << fmt(r.eta_noise1) << ',' << fmt(r.eta_noise2)
          << ',' << fmt(r.eta_noise3) << ',' << fmt(r.eta_lin) << ',' << r.fp_iters << '\n';
    }
  }
}

void write_csv(const std::string& path, const std::vector<PathLog>& logs) {
  auto out = open_out(path);
  write_csv(out, logs);
  check_stream(out, path);
}

std::vector<CsvRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("csv: unexpected header");
  }
  std::vector<CsvRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 14) {
      throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected 14 fields");
    }
    CsvRow row;
    auto& r = row.record;
    row.path_id = parse_field<int>(f[0], lineno);
    r.n = parse_field<int>(f[1], lineno);
    r.t = parse_field<double>(f[2], lineno);
    r.tau = parse_field<double>(f[3], lineno);
    r.ndof = parse_field<std::size_t>(f[4], lineno);
    r.eta_time1 = parse_field<double>(f[5], lineno);
    r.eta_time2 = parse_field<double>(f[6], lineno);
    r.eta_space1 = parse_field<double>(f[7], lineno);
    r.eta_space2 = parse_field<double>(f[8], lineno);
    r.eta_noise1 = parse_field<double>(f[9], lineno);
    r.eta_noise2 = parse_field<double>(f[10], lineno);
    r.eta_noise3 = parse_field<double>(f[11], lineno);
    r.eta_lin = parse_field<double>(f[12], lineno);
    r.fp_iters = parse_field<int>(f[13], lineno);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CsvRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

void write_vtk(std::ostream& out, const Mesh& mesh, const FeFunction& solution,
               const std::vector<double>& eta_T) {
  require_on(mesh, {&solution});
  if (!eta_T.empty() && eta_T.size() != mesh.num_triangles()) {
    throw std::invalid_argument("write_vtk: eta_T does not match the mesh");
  }
  const std::size_t nv = mesh.num_vertices(), nt = mesh.num_triangles();
  out << "# vtk DataFile Version 2.0\nstvf snapshot\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (std::size_t i = 0; i < nv; ++i) {
    const Point& p = mesh.vertex(static_cast<VertexId>(i));
    out << fmt(p.x) << ' ' << fmt(p.y) << " 0\n";
  }
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& v = mesh.triangle(t);
    out << "3 " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  }
  out << "CELL_TYPES " << nt << '\n';
  for (std::size_t t = 0; t < nt; ++t) out << "5\n";
  out << "POINT_DATA " << nv << "\nSCALARS solution double 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < nv; ++i) out << fmt(solution[i]) << '\n';
  if (!eta_T.empty()) {
    out << "CELL_DATA " << nt << "\nSCALARS eta_T double 1\nLOOKUP_TABLE default\n";
    for (double e : eta_T) out << fmt(e) << '\n';
  }
}

void write_vtk(const std::string& path, const Mesh& mesh, const FeFunction& solution,
               const std::vector<double>& eta_T) {
  auto out = open_out(path);
  write_vtk(out, mesh, solution, eta_T);
  check_stream(out, path);
}

std::string summary_json(const RunConfig& config, const McResult& result) {
  using nlohmann::json;
  json paths = json::array();
  for (const auto& log : result.logs) {
    json p{{"path_id", log.path_id}, {"failed", log.failed}};
    if (log.failed) {
      p["error"] = log.error;
    } else if (!log.records.empty()) {
      p["steps"] = log.records.size();
      p["final_ndof"] = log.records.back().ndof;
      p["max_level"] = log.final_mesh->max_level();
      json avg;
      for (std::size_t q = 0; q < kQuantityCount; ++q) {
        avg[quantity_name(static_cast<Quantity>(q))] =
            time_average(log.records, static_cast<Quantity>(q)).back();
      }
      p["final_time_average"] = avg;
    }
    paths.push_back(p);
  }
  json mean, se;
  for (std::size_t q = 0; q < kQuantityCount; ++q) {
    const char* name = quantity_name(static_cast<Quantity>(q));
    mean[name] = result.summary.mean_final_average[q];
    se[name] = result.summary.stderr_final_average[q];
  }
  const auto tol = config.tolerances();
  json j{{"config", json::parse(config.to_json())},
         {"tol_h", tol.h},
         {"tol_tau", tol.tau},
         {"paths_ok", result.summary.paths_ok},
         {"failed_paths", result.summary.failed_paths},
         {"mean_final_time_average", mean},
         {"stderr_final_time_average", se},
         {"mean_final_ndof", result.summary.mean_final_ndof},
         {"mean_steps", result.summary.mean_steps},
         {"paths", paths}};
  return j.dump(2);
}

}  // namespace stvf
