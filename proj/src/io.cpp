#include "wrg/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wrg {

namespace {

std::ofstream open_out(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_nodes_csv(const std::string& path, const NodeSet& nodes) {
  std::ofstream out = open_out(path);
  out << "i,x\n";
  for (int i = 0; i < nodes.size(); ++i)
    out << i + 1 << ',' << format_double(nodes.coords[i]) << '\n';
  finish(out, path);
}

void write_matrix_csv(const std::string& path, const WeightMatrix& xi) {
  std::ofstream out = open_out(path);
  for (int i = 0; i < xi.n; ++i) {
    const double* row = xi.row(i);
    for (int j = 0; j < xi.n; ++j) {
      if (j) out << ',';
      out << format_double(row[j]);
    }
    out << '\n';
  }
  finish(out, path);
}

void write_matrix_pgm(const std::string& path, const WeightMatrix& xi) {
  double peak = 0.0;
  for (double v : xi.w) peak = std::max(peak, v);
  std::ofstream out = open_out(path);
  out << "P2\n" << xi.n << ' ' << xi.n << "\n255\n";
  for (int i = 0; i < xi.n; ++i) {
    const double* row = xi.row(i);
    for (int j = 0; j < xi.n; ++j) {
      if (j) out << ' ';
      out << (peak == 0.0 ? 0 : static_cast<int>(std::lround(255.0 * row[j] / peak)));
    }
    out << '\n';
  }
  finish(out, path);
}

void write_mean_kernel_csv(const std::string& path, const GraphLaw& law, int grid) {
  if (grid <= 0) throw std::invalid_argument("grid must be positive");
  std::ofstream out = open_out(path);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      if (j) out << ',';
      out << format_double(law.mean(midcell(i, grid), midcell(j, grid)));
    }
    out << '\n';
  }
  finish(out, path);
}

namespace {

void write_states_csv(std::ofstream& out, const Trajectory& traj, const char* prefix) {
  out << 't';
  for (int i = 1; i <= traj.n; ++i) out << ',' << prefix << i;
  out << '\n';
  for (int k = 0; k < traj.steps(); ++k) {
    out << format_double(traj.time_at(k));
    const double* row = traj.state(k);
    for (int i = 0; i < traj.n; ++i) out << ',' << format_double(row[i]);
    out << '\n';
  }
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out = open_out(path);
  write_states_csv(out, traj, "u_");
  finish(out, path);
}

void write_grid_trajectory_csv(const std::string& path, const GridTrajectory& sol) {
  std::ofstream out = open_out(path);
  out << "# midcells";
  for (int i = 0; i < sol.m(); ++i) out << ',' << format_double(midcell(i, sol.m()));
  out << '\n';
  write_states_csv(out, sol.traj, "x_");
  finish(out, path);
}

void write_snapshot_csv(const std::string& path, const GridFunction& u) {
  std::ofstream out = open_out(path);
  out << "x,u\n";
  for (int i = 0; i < u.m; ++i)
    out << format_double(midcell(i, u.m)) << ',' << format_double(u.values[i]) << '\n';
  finish(out, path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_out(path);
  out << content;
  finish(out, path);
}

}  // namespace wrg
